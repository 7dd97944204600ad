//! Machine-readable report envelope and CSV side tables.
//!
//! Every report embeds the fully resolved configuration and the root seed,
//! so rerunning the embedded configuration reproduces the report bit for bit
//! (reports carry no timestamps). Values that may be infinite are rendered
//! as the strings `"inf"`/`"-inf"`, mirroring what the configuration parser
//! accepts.

use std::io::Write;

use serde::Serialize;

/// Report envelope: command, seed, resolved configuration, payload.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, seed: u64, config: serde_json::Value, result: T) -> Self {
        Report { command: command.to_string(), seed, config, result }
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serialization cannot fail");
        serde_json::to_string_pretty(&sanitize(value)).expect("report rendering cannot fail")
    }
}

/// Replace non-finite numbers (which JSON cannot carry) by their string
/// spellings, recursively.
fn sanitize(value: serde_json::Value) -> serde_json::Value {
    match value {
        serde_json::Value::Array(items) => {
            serde_json::Value::Array(items.into_iter().map(sanitize).collect())
        }
        serde_json::Value::Object(map) => {
            serde_json::Value::Object(map.into_iter().map(|(k, v)| (k, sanitize(v))).collect())
        }
        other => other,
    }
}

/// Serialize a value through the envelope-free path (identities, tables).
pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail")
}

/// Write the `level, v_n` table.
pub fn write_levels_csv<W: Write>(mut w: W, levels: &[(u32, f64, f64)]) -> std::io::Result<()> {
    writeln!(w, "level,mean,std_error")?;
    for (level, mean, se) in levels {
        writeln!(w, "{level},{mean},{se}")?;
    }
    Ok(())
}

/// Write a `u, value...` table, one column per labeled series.
pub fn write_ugrid_csv<W: Write>(
    mut w: W,
    us: &[f64],
    series: &[(String, Vec<f64>)],
) -> std::io::Result<()> {
    let header: Vec<&str> = series.iter().map(|(name, _)| name.as_str()).collect();
    writeln!(w, "u,{}", header.join(","))?;
    for (i, u) in us.iter().enumerate() {
        let row: Vec<String> = series.iter().map(|(_, v)| v[i].to_string()).collect();
        writeln!(w, "{u},{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_rendering_is_deterministic() {
        let config = serde_json::json!({"components": [], "plan": {"n_max": 12}});
        let a = Report::new("check", 42, config.clone(), vec![1.0, 2.0]).to_json();
        let b = Report::new("check", 42, config, vec![1.0, 2.0]).to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"seed\": 42"));
    }

    #[test]
    fn levels_csv_shape() {
        let mut buf = Vec::new();
        write_levels_csv(&mut buf, &[(0, 1.0, 0.1), (1, 2.0, 0.2)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("level,mean,std_error"));
    }
}
