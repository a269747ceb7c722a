//! Shared test helpers: binary invocation and a small JSON Schema checker
//! covering the subset used by the shipped schema files.

// Each test binary compiles this module separately and uses only part of it.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

pub struct Run {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn mzv(args: &[&str]) -> Run {
    mzv_with_env(args, &[])
}

pub fn mzv_with_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mzv"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let output = cmd.output().expect("binary runs");
    Run {
        stdout: String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        stderr: String::from_utf8(output.stderr).expect("stderr is UTF-8"),
        code: output.status.code().expect("no signal"),
    }
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

pub struct SchemaSet {
    schemas: HashMap<String, Value>,
}

impl SchemaSet {
    pub fn load() -> SchemaSet {
        let mut schemas = HashMap::new();
        for entry in std::fs::read_dir(schema_dir()).expect("schema dir exists") {
            let path = entry.unwrap().path();
            if path.extension().and_then(|e| e.to_str()) == Some("json") {
                let name = path.file_name().unwrap().to_str().unwrap().to_string();
                let text = std::fs::read_to_string(&path).unwrap();
                schemas.insert(name, serde_json::from_str(&text).unwrap());
            }
        }
        SchemaSet { schemas }
    }

    pub fn validate(&self, schema_file: &str, value: &Value) -> Result<(), String> {
        let schema = self
            .schemas
            .get(schema_file)
            .unwrap_or_else(|| panic!("schema {schema_file} shipped"));
        self.check(schema_file, schema, value, schema_file)
    }

    fn resolve<'a>(&'a self, current_file: &str, reference: &str) -> (&'a str, &'a Value) {
        let (file, pointer) = match reference.split_once('#') {
            Some((f, p)) => (if f.is_empty() { current_file } else { f }, p),
            None => (reference, ""),
        };
        let (file_key, root) = self
            .schemas
            .get_key_value(file)
            .unwrap_or_else(|| panic!("referenced schema {file} shipped"));
        let mut node = root;
        for step in pointer.split('/').filter(|s| !s.is_empty()) {
            node = node
                .get(step)
                .unwrap_or_else(|| panic!("pointer {pointer} resolves in {file}"));
        }
        (file_key.as_str(), node)
    }

    fn check(
        &self,
        file: &str,
        schema: &Value,
        value: &Value,
        at: &str,
    ) -> Result<(), String> {
        if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
            let (ref_file, target) = self.resolve(file, reference);
            return self.check(ref_file, target, value, at);
        }
        if let Some(variants) = schema.get("oneOf").and_then(Value::as_array) {
            if variants
                .iter()
                .any(|v| self.check(file, v, value, at).is_ok())
            {
                return Ok(());
            }
            return Err(format!("{at}: no oneOf variant matched"));
        }
        if let Some(options) = schema.get("enum").and_then(Value::as_array) {
            if options.contains(value) {
                return Ok(());
            }
            return Err(format!("{at}: {value} not in enum"));
        }
        if let Some(ty) = schema.get("type").and_then(Value::as_str) {
            let ok = match ty {
                "object" => value.is_object(),
                "array" => value.is_array(),
                "string" => value.is_string(),
                "number" => value.is_number(),
                "integer" => value.is_i64() || value.is_u64(),
                "boolean" => value.is_boolean(),
                "null" => value.is_null(),
                other => panic!("unsupported type {other}"),
            };
            if !ok {
                return Err(format!("{at}: expected {ty}, got {value}"));
            }
        }
        if let Some(pattern) = schema.get("pattern").and_then(Value::as_str) {
            let text = value.as_str().ok_or_else(|| format!("{at}: not a string"))?;
            if !matches_known_pattern(pattern, text) {
                return Err(format!("{at}: {text:?} fails pattern {pattern}"));
            }
        }
        if let Some(props) = schema.get("properties").and_then(Value::as_object) {
            let object = value
                .as_object()
                .ok_or_else(|| format!("{at}: not an object"))?;
            for (key, sub) in props {
                if let Some(v) = object.get(key) {
                    self.check(file, sub, v, &format!("{at}.{key}"))?;
                }
            }
            if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
                for key in object.keys() {
                    if !props.contains_key(key) {
                        return Err(format!("{at}: unexpected property {key}"));
                    }
                }
            }
        }
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            let object = value
                .as_object()
                .ok_or_else(|| format!("{at}: not an object"))?;
            for key in required {
                let key = key.as_str().unwrap();
                if !object.contains_key(key) {
                    return Err(format!("{at}: missing required {key}"));
                }
            }
        }
        if let Some(items) = schema.get("items") {
            if let Some(array) = value.as_array() {
                for (i, v) in array.iter().enumerate() {
                    self.check(file, items, v, &format!("{at}[{i}]"))?;
                }
            }
        }
        Ok(())
    }
}

/// The shipped schemas use exactly three patterns; keep them in sync here.
fn matches_known_pattern(pattern: &str, text: &str) -> bool {
    match pattern {
        "^(0|1|inf|s[0-9]+)$" => {
            text == "0"
                || text == "1"
                || text == "inf"
                || (text.len() >= 2
                    && text.starts_with('s')
                    && text[1..].chars().all(|c| c.is_ascii_digit()))
        }
        "^\\{[^|]*\\}\\|\\{[^|]*\\}$" => {
            if let Some((a, b)) = text.split_once('|') {
                let braced = |s: &str| {
                    s.starts_with('{') && s.ends_with('}') && !s[1..s.len() - 1].contains('|')
                };
                braced(a) && braced(b)
            } else {
                false
            }
        }
        "^[01]+$" => !text.is_empty() && text.chars().all(|c| c == '0' || c == '1'),
        other => panic!("pattern {other} not mirrored in the test validator"),
    }
}
