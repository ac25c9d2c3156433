//! Resolving diagram arguments: `family:<name>[:<n>]`, `fixture:<name>`,
//! `-` for stdin, or a file path.

use std::io::Read;

use doodle_core::codec::{emit_pd, read_map, Format, PdDocument};
use doodle_core::families;
use doodle_core::{DoodleMap, Mode};

use crate::CliError;

pub struct Input {
    pub map: DoodleMap,
    /// The drawing as given, when the input was a PD document.
    pub drawing: Option<PdDocument>,
}

impl Input {
    /// The given drawing, or a planarization of the map.
    pub fn drawing(&self) -> PdDocument {
        self.drawing.clone().unwrap_or_else(|| emit_pd(&self.map))
    }
}

fn sniff(text: &str) -> Format {
    let body = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    if body.starts_with('{') {
        Format::Json
    } else if body.starts_with("X(") || body.starts_with("V(") || body.starts_with("O(") {
        Format::Pd
    } else {
        Format::Gauss
    }
}

pub fn load(spec: &str, format: Option<Format>, mode: Mode) -> Result<Input, CliError> {
    if let Some(rest) = spec.strip_prefix("family:") {
        let (name, n) = match rest.split_once(':') {
            Some((name, n)) => {
                let n = n.parse().map_err(|_| CliError::Usage(format!("bad family size `{n}`")))?;
                (name, Some(n))
            }
            None => (rest, None),
        };
        let map = families::family(name, n).map_err(|e| CliError::Usage(e.to_string()))?;
        return Ok(Input { map, drawing: None });
    }
    if let Some(name) = spec.strip_prefix("fixture:") {
        let doc = families::fixture(name).map_err(|e| CliError::Usage(e.to_string()))?;
        let map = families::fixture_map(name).map_err(|e| CliError::Parse(e.to_string()))?;
        return Ok(Input { map, drawing: Some(doc) });
    }
    let text = if spec == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(e.to_string()))?;
        s
    } else {
        std::fs::read_to_string(spec).map_err(|e| CliError::Io(format!("{spec}: {e}")))?
    };
    let format = format.or_else(|| Format::from_extension(spec)).unwrap_or_else(|| sniff(&text));
    let map = read_map(&text, format, mode).map_err(|e| CliError::Parse(format!("{spec}: {e}")))?;
    let drawing = match format {
        Format::Pd => Some(PdDocument::parse(&text).map_err(|e| CliError::Parse(e.to_string()))?),
        _ => None,
    };
    Ok(Input { map, drawing })
}
