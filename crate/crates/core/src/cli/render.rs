use serde_json::Value;

const GREEN: &str = "\x1b[32m";
const RED: &str = "\x1b[31m";
const RESET: &str = "\x1b[0m";
const LEAD: [&str; 4] = ["scenario", "identity", "kind", "n"];

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            let parts: Vec<String> = a.iter().map(scalar).collect();
            format!("[{}]", parts.join(","))
        }
        Value::Array(a) => format!("[{} items]", a.len()),
        Value::Object(o) => format!("{{{} keys}}", o.len()),
        other => other.to_string(),
    }
}

fn line(rec: &Value, color: bool) -> String {
    let Some(obj) = rec.as_object() else {
        return rec.to_string();
    };
    let mut out = String::new();
    if let Some(p) = obj.get("pass").and_then(Value::as_bool) {
        let (tag, c) = if p { ("PASS", GREEN) } else { ("FAIL", RED) };
        if color {
            out.push_str(&format!("{c}{tag}{RESET} "));
        } else {
            out.push_str(tag);
            out.push(' ');
        }
    }
    let mut fields: Vec<String> = LEAD
        .iter()
        .filter_map(|k| obj.get(*k).map(|v| format!("{k}={}", scalar(v))))
        .collect();
    for (k, v) in obj {
        if LEAD.contains(&k.as_str()) || k == "pass" {
            continue;
        }
        let shown = match (k.as_str(), v) {
            ("isometric_order", Value::Null) => {
                format!("none ≤ {}", obj.get("cap").map(scalar).unwrap_or_default())
            }
            _ => scalar(v),
        };
        fields.push(format!("{k}={shown}"));
    }
    out.push_str(&fields.join(" "));
    out
}

/// One line per record, `PASS`/`FAIL` first when the record carries a verdict.
pub fn text(records: &[&Value], color: bool) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&line(r, color));
        s.push('\n');
    }
    s
}
