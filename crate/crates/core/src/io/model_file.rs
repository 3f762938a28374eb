use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CoordinateMap, ModelSpec, PhaseSpec, Rect};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhaseFile {
    name: String,
    q: u32,
    coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    re: [f64; 2],
    im: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    phases: Vec<PhaseFile>,
    domain: DomainFile,
    #[serde(default)]
    coordinate_map: CoordinateMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha_ref: Option<f64>,
}

/// Parses a model definition. Syntax errors carry their line and column;
/// semantic errors name the offending phase or field.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let raw: ModelFile = serde_json::from_str(text).map_err(|e| {
        Error::ModelFile(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let phases = raw
        .phases
        .into_iter()
        .map(|p| PhaseSpec::new(p.name, p.q, p.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect()))
        .collect();
    let domain = Rect::new(raw.domain.re[0], raw.domain.re[1], raw.domain.im[0], raw.domain.im[1]);
    let wrap = |e: Error| Error::ModelFile(e.to_string());
    let mut model = ModelSpec::new(phases, domain).map_err(wrap)?.with_coordinate_map(raw.coordinate_map);
    if let Some(a) = raw.alpha_ref {
        model = model.with_alpha_ref(a).map_err(wrap)?;
    }
    Ok(model)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ModelFile(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| match e {
        Error::ModelFile(msg) => Error::ModelFile(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn model_to_json(model: &ModelSpec) -> String {
    let d = model.domain();
    let raw = ModelFile {
        phases: model
            .phases()
            .iter()
            .map(|p| PhaseFile {
                name: p.name.clone(),
                q: p.degeneracy,
                coeffs: p.exponent.0.iter().map(|c| [c.re, c.im]).collect(),
            })
            .collect(),
        domain: DomainFile {
            re: [d.re.0, d.re.1],
            im: [d.im.0, d.im.1],
        },
        coordinate_map: model.coordinate_map(),
        alpha_ref: Some(model.alpha_ref()),
    };
    serde_json::to_string_pretty(&raw).expect("model serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;

    const M2: &str = r#"{
  "phases": [
    {"name": "plus", "q": 1, "coeffs": [[0, 0], [1, 0]]},
    {"name": "minus", "q": 2, "coeffs": [[0, 0], [-1, 0]]}
  ],
  "domain": {"re": [-1, 1], "im": [-1, 1]},
  "coordinate_map": "identity"
}"#;

    #[test]
    fn parses_a_two_phase_model() {
        let m = parse_model(M2).unwrap();
        assert_eq!(m.num_phases(), 2);
        assert_eq!(m.degeneracy(1), 2);
        assert_eq!(m.domain(), Rect::new(-1.0, 1.0, -1.0, 1.0));
    }

    #[test]
    fn syntax_errors_report_the_line() {
        let broken = M2.replace("\"q\": 2,", "\"q\": 2");
        match parse_model(&broken) {
            Err(Error::ModelFile(msg)) => assert!(msg.starts_with("line 4"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_are_model_file_errors() {
        let zero_q = M2.replace("\"q\": 2", "\"q\": 0");
        assert!(matches!(parse_model(&zero_q), Err(Error::ModelFile(_))));
        let inverted = M2.replace("\"re\": [-1, 1]", "\"re\": [1, -1]");
        assert!(matches!(parse_model(&inverted), Err(Error::ModelFile(_))));
        let extra = M2.replace("\"coordinate_map\"", "\"colour\": 1, \"coordinate_map\"");
        assert!(matches!(parse_model(&extra), Err(Error::ModelFile(_))));
    }

    #[test]
    fn round_trip_preserves_presets() {
        for model in [presets::two_phase(1, 2), presets::three_phase(&[1, 1, 2]), presets::lee_yang()] {
            assert_eq!(parse_model(&model_to_json(&model)).unwrap(), model);
        }
    }

    #[test]
    fn missing_file_names_the_path() {
        let e = load_model("/nonexistent/model.json").unwrap_err();
        assert!(e.to_string().contains("/nonexistent/model.json"));
    }
}
