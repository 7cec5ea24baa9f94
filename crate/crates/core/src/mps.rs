//! Free-format MPS writer and reader for [`FlatMip`] problems.
//!
//! Affine structure goes into the usual ROWS/COLUMNS/RHS/BOUNDS sections;
//! every convex quadratic row additionally contributes a `QCMATRIX` section
//! listing its diagonal curvature entries. Floats are written in shortest
//! round-trip form, so writing and re-reading a formulation reproduces the
//! exact same numbers.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use crate::flatmip::{ConvexRow, FlatMip, LinRow, MipVar, Provenance, VarKind, VarTag};
use crate::model::Sense;

const OBJ_ROW: &str = "obj";

/// Serializes a formulation to free MPS text.
pub fn write_mps(f: &FlatMip) -> String {
    let mut out = String::new();
    let name = if f.name.is_empty() { "flatmip" } else { &f.name };
    let _ = writeln!(out, "NAME {name}");
    let _ = writeln!(out, "OBJSENSE\n    MIN");
    let _ = writeln!(out, "ROWS");
    let _ = writeln!(out, " N  {OBJ_ROW}");
    for r in &f.linear_rows {
        let tag = match r.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {tag}  {}", r.name);
    }
    for r in &f.convex_rows {
        let _ = writeln!(out, " L  {}", r.name);
    }

    // Column-major view of objective, linear rows and convex linear parts.
    let mut entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); f.num_vars()];
    for (j, &c) in f.objective.iter().enumerate() {
        // Every column appears at least in the objective so that the reader
        // reconstructs variables in their original order.
        entries[j].push((OBJ_ROW.to_string(), c));
    }
    for r in &f.linear_rows {
        for &(j, c) in &r.coeffs {
            entries[j].push((r.name.clone(), c));
        }
    }
    for r in &f.convex_rows {
        for &(j, c) in &r.linear {
            entries[j].push((r.name.clone(), c));
        }
    }

    let _ = writeln!(out, "COLUMNS");
    let mut in_integer = false;
    let mut marker = 0usize;
    for (j, var) in f.vars.iter().enumerate() {
        let integer = var.kind == VarKind::Binary;
        if integer != in_integer {
            let kind = if integer { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    M{marker}  'MARKER'  {kind}");
            marker += 1;
            in_integer = integer;
        }
        for (row, c) in &entries[j] {
            let _ = writeln!(out, "    {}  {row}  {c}", var.name);
        }
    }
    if in_integer {
        let _ = writeln!(out, "    M{marker}  'MARKER'  'INTEND'");
    }

    let _ = writeln!(out, "RHS");
    if f.objective_constant != 0.0 {
        let _ = writeln!(out, "    RHS  {OBJ_ROW}  {}", -f.objective_constant);
    }
    for r in &f.linear_rows {
        if r.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", r.name, r.rhs);
        }
    }
    for r in &f.convex_rows {
        if r.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", r.name, r.rhs);
        }
    }

    let _ = writeln!(out, "BOUNDS");
    for var in &f.vars {
        let _ = writeln!(out, " LO BND  {}  {}", var.name, var.lower);
        let _ = writeln!(out, " UP BND  {}  {}", var.name, var.upper);
    }

    for r in &f.convex_rows {
        let _ = writeln!(out, "QCMATRIX   {}", r.name);
        for &(j, a) in &r.quad {
            let v = &f.vars[j].name;
            let _ = writeln!(out, "    {v}  {v}  {a}");
        }
    }
    let _ = writeln!(out, "ENDATA");
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum MpsError {
    Syntax { line: usize, message: String },
    UnknownRow { line: usize, row: String },
    UnknownColumn { line: usize, column: String },
    OffDiagonalQuadratic { line: usize },
    MissingSection(&'static str),
}

impl fmt::Display for MpsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MpsError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            MpsError::UnknownRow { line, row } => write!(f, "line {line}: unknown row {row}"),
            MpsError::UnknownColumn { line, column } => {
                write!(f, "line {line}: unknown column {column}")
            }
            MpsError::OffDiagonalQuadratic { line } => {
                write!(f, "line {line}: only diagonal quadratic entries are supported")
            }
            MpsError::MissingSection(s) => write!(f, "missing section {s}"),
        }
    }
}

impl std::error::Error for MpsError {}

fn tag_from_name(name: &str, kind: VarKind) -> VarTag {
    if let Some(rest) = name.strip_prefix('x') {
        if let Ok(i) = rest.parse::<usize>() {
            return VarTag::X(i);
        }
    }
    if kind == VarKind::Binary {
        if let Some(rest) = name.strip_prefix("lam") {
            let parts: Vec<&str> = rest.split('_').collect();
            if parts.len() == 2 {
                if let (Ok(d), Ok(l)) = (parts[0].parse(), parts[1].parse()) {
                    return VarTag::Lambda { disjunction: d, disjunct: l };
                }
            }
        }
    }
    VarTag::Slack
}

/// Parses free MPS text produced by [`write_mps`] (plus the common bound
/// types) back into a [`FlatMip`].
pub fn parse_mps(text: &str) -> Result<FlatMip, MpsError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
        Qc(usize),
        Done,
    }

    struct RowInfo {
        name: String,
        sense: Sense,
        coeffs: Vec<(usize, f64)>,
        rhs: f64,
        quad: Vec<(usize, f64)>,
    }

    let mut name = String::new();
    let mut obj_row: Option<String> = None;
    let mut rows: Vec<RowInfo> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut vars: Vec<MipVar> = Vec::new();
    let mut var_index: HashMap<String, usize> = HashMap::new();
    let mut objective: Vec<f64> = Vec::new();
    let mut objective_constant = 0.0;
    let mut integer_mode = false;
    let mut section = Section::None;
    let mut pending_objsense = false;

    let parse_num = |tok: &str, line_no: usize| -> Result<f64, MpsError> {
        tok.parse::<f64>().map_err(|_| MpsError::Syntax {
            line: line_no,
            message: format!("bad number {tok}"),
        })
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('*') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let starts_at_margin = !raw.starts_with(' ') && !raw.starts_with('\t');

        if starts_at_margin {
            match fields[0].to_ascii_uppercase().as_str() {
                "NAME" => {
                    name = fields.get(1).unwrap_or(&"").to_string();
                    continue;
                }
                "OBJSENSE" => {
                    pending_objsense = true;
                    section = Section::None;
                    continue;
                }
                "ROWS" => {
                    section = Section::Rows;
                    continue;
                }
                "COLUMNS" => {
                    section = Section::Columns;
                    continue;
                }
                "RHS" => {
                    section = Section::Rhs;
                    continue;
                }
                "RANGES" => {
                    return Err(MpsError::Syntax { line: line_no, message: "RANGES not supported".into() });
                }
                "BOUNDS" => {
                    section = Section::Bounds;
                    continue;
                }
                "QCMATRIX" => {
                    let row = fields.get(1).ok_or(MpsError::Syntax {
                        line: line_no,
                        message: "QCMATRIX needs a row name".into(),
                    })?;
                    let &ri = row_index.get(*row).ok_or_else(|| MpsError::UnknownRow {
                        line: line_no,
                        row: row.to_string(),
                    })?;
                    section = Section::Qc(ri);
                    continue;
                }
                "ENDATA" => {
                    section = Section::Done;
                    continue;
                }
                _ => {
                    return Err(MpsError::Syntax {
                        line: line_no,
                        message: format!("unexpected section {}", fields[0]),
                    });
                }
            }
        }

        if pending_objsense {
            // Indented MIN / MAX line under OBJSENSE.
            let dir = fields[0].to_ascii_uppercase();
            if dir == "MIN" || dir == "MINIMIZE" {
                pending_objsense = false;
                continue;
            }
            if dir == "MAX" || dir == "MAXIMIZE" {
                return Err(MpsError::Syntax { line: line_no, message: "only minimization supported".into() });
            }
        }

        match section {
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(MpsError::Syntax { line: line_no, message: "row line needs <sense> <name>".into() });
                }
                let sense = match fields[0].to_ascii_uppercase().as_str() {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(fields[1].to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    other => {
                        return Err(MpsError::Syntax { line: line_no, message: format!("bad row sense {other}") })
                    }
                };
                row_index.insert(fields[1].to_string(), rows.len());
                rows.push(RowInfo { name: fields[1].to_string(), sense, coeffs: vec![], rhs: 0.0, quad: vec![] });
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    match fields[2] {
                        "'INTORG'" => integer_mode = true,
                        "'INTEND'" => integer_mode = false,
                        _ => {
                            return Err(MpsError::Syntax { line: line_no, message: "bad marker".into() })
                        }
                    }
                    continue;
                }
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(MpsError::Syntax {
                        line: line_no,
                        message: "column line needs <var> (<row> <value>)+".into(),
                    });
                }
                let vname = fields[0];
                let j = *var_index.entry(vname.to_string()).or_insert_with(|| {
                    let kind = if integer_mode { VarKind::Binary } else { VarKind::Continuous };
                    vars.push(MipVar {
                        name: vname.to_string(),
                        lower: 0.0,
                        upper: f64::INFINITY,
                        kind,
                        tag: tag_from_name(vname, kind),
                    });
                    objective.push(0.0);
                    vars.len() - 1
                });
                for pair in fields[1..].chunks(2) {
                    let value = parse_num(pair[1], line_no)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        objective[j] += value;
                    } else {
                        let &ri = row_index.get(pair[0]).ok_or_else(|| MpsError::UnknownRow {
                            line: line_no,
                            row: pair[0].to_string(),
                        })?;
                        rows[ri].coeffs.push((j, value));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(MpsError::Syntax {
                        line: line_no,
                        message: "rhs line needs <set> (<row> <value>)+".into(),
                    });
                }
                for pair in fields[1..].chunks(2) {
                    let value = parse_num(pair[1], line_no)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        objective_constant = -value;
                    } else {
                        let &ri = row_index.get(pair[0]).ok_or_else(|| MpsError::UnknownRow {
                            line: line_no,
                            row: pair[0].to_string(),
                        })?;
                        rows[ri].rhs = value;
                    }
                }
            }
            Section::Bounds => {
                if fields.len() < 3 {
                    return Err(MpsError::Syntax { line: line_no, message: "bound line too short".into() });
                }
                let btype = fields[0].to_ascii_uppercase();
                let vname = fields[2];
                let &j = var_index.get(vname).ok_or_else(|| MpsError::UnknownColumn {
                    line: line_no,
                    column: vname.to_string(),
                })?;
                match btype.as_str() {
                    "LO" => vars[j].lower = parse_num(fields[3], line_no)?,
                    "UP" => vars[j].upper = parse_num(fields[3], line_no)?,
                    "FX" => {
                        let v = parse_num(fields[3], line_no)?;
                        vars[j].lower = v;
                        vars[j].upper = v;
                    }
                    "BV" => {
                        vars[j].kind = VarKind::Binary;
                        vars[j].lower = 0.0;
                        vars[j].upper = 1.0;
                    }
                    "FR" => {
                        vars[j].lower = f64::NEG_INFINITY;
                        vars[j].upper = f64::INFINITY;
                    }
                    "MI" => vars[j].lower = f64::NEG_INFINITY,
                    "PL" => vars[j].upper = f64::INFINITY,
                    other => {
                        return Err(MpsError::Syntax { line: line_no, message: format!("bad bound type {other}") })
                    }
                }
            }
            Section::Qc(ri) => {
                if fields.len() != 3 {
                    return Err(MpsError::Syntax {
                        line: line_no,
                        message: "quadratic entry needs <var> <var> <value>".into(),
                    });
                }
                if fields[0] != fields[1] {
                    return Err(MpsError::OffDiagonalQuadratic { line: line_no });
                }
                let &j = var_index.get(fields[0]).ok_or_else(|| MpsError::UnknownColumn {
                    line: line_no,
                    column: fields[0].to_string(),
                })?;
                rows[ri].quad.push((j, parse_num(fields[2], line_no)?));
            }
            Section::None | Section::Done => {
                return Err(MpsError::Syntax { line: line_no, message: "data outside any section".into() });
            }
        }
    }

    if obj_row.is_none() {
        return Err(MpsError::MissingSection("ROWS (objective)"));
    }

    let mut f = FlatMip {
        name,
        vars,
        linear_rows: Vec::new(),
        convex_rows: Vec::new(),
        objective,
        objective_constant,
        warnings: Vec::new(),
    };
    for r in rows {
        if r.quad.is_empty() {
            f.linear_rows.push(LinRow {
                name: r.name,
                coeffs: r.coeffs,
                sense: r.sense,
                rhs: r.rhs,
                provenance: Provenance::default(),
            });
        } else {
            f.convex_rows.push(ConvexRow {
                name: r.name,
                quad: r.quad,
                linear: r.coeffs,
                rhs: r.rhs,
                provenance: Provenance::default(),
            });
        }
    }
    Ok(f)
}
