//! JSON helpers shared by the file interfaces.

/// Serde adapter for reals that accepts either a JSON number or a decimal
/// string, and always writes a number. Shortest-round-trip float formatting
/// makes writes lossless.
pub mod flex_f64 {
    use serde::de::{self, Deserializer, Unexpected};
    use serde::ser::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_f64(*v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        struct Visitor;

        impl<'de> de::Visitor<'de> for Visitor {
            type Value = f64;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a number or a decimal string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| E::invalid_value(Unexpected::Str(v), &"a decimal string"))
            }
        }

        de.deserialize_any(Visitor)
    }
}
