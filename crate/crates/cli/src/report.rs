//! Reports: ordered `key = value` entries with dotted keys, rendered as text
//! lines grouped by the first key segment, or as the equivalent JSON tree.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
    /// Replaces the text rendering when set.
    raw: Option<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn list<T: Into<Value>>(&mut self, key: impl Into<String>, values: impl IntoIterator<Item = T>) -> &mut Self {
        let values: Vec<Value> = values.into_iter().map(Into::into).collect();
        self.put(key, Value::Array(values))
    }

    pub fn set_raw(&mut self, text: String) {
        self.raw = Some(text);
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_text(&self) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut out = String::new();
        let mut section: Option<&str> = None;
        for (key, value) in &self.entries {
            let head = key.split('.').next().unwrap_or(key);
            if section.is_some_and(|s| s != head) && key.contains('.') {
                out.push('\n');
            }
            section = Some(head);
            out.push_str(&format!("{key} = {}\n", render(value)));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        for (key, value) in &self.entries {
            let mut parts: Vec<&str> = key.split('.').collect();
            let leaf = parts.pop().unwrap_or(key);
            let mut node = &mut root;
            for part in parts {
                let child = node.entry(part).or_insert_with(|| Value::Object(Map::new()));
                if !child.is_object() {
                    // A scalar already sits here; keep it under an empty key.
                    let old = child.take();
                    *child = Value::Object(Map::from_iter([(String::new(), old)]));
                }
                node = child.as_object_mut().expect("made an object above");
            }
            node.insert(leaf.to_string(), value.clone());
        }
        Value::Object(root)
    }
}

fn render(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(render).collect::<Vec<_>>().join(", "),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}
