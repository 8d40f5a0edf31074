//! Reading the two-column CSV input and model files.

use std::path::Path;

use opdep::model_file::{Model, ModelFileError};

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_real(field: &str) -> Option<f64> {
    field.trim().parse().ok()
}

/// Comma-separated, `.` decimal point, first two columns are `x` and `y`.
/// A first row whose leading cells are not both numeric is a header. Blank
/// lines are skipped.
pub fn parse_series(text: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let (mut x, mut y) = (Vec::new(), Vec::new());
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Usage(format!("CSV error: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() < 2 {
            return Err(CliError::Usage(format!(
                "line {line}: expected two columns (x, y), found {}",
                record.len()
            )));
        }
        let (a, b) = (parse_real(&record[0]), parse_real(&record[1]));
        if std::mem::take(&mut first) && (a.is_none() || b.is_none()) {
            log::debug!("line {line} taken as header");
            continue;
        }
        for (col, (v, raw)) in [(a, &record[0]), (b, &record[1])].into_iter().enumerate() {
            if v.is_none() {
                return Err(CliError::Usage(format!(
                    "line {line}, column {}: cannot parse {raw:?} as a number",
                    col + 1
                )));
            }
        }
        x.push(a.unwrap_or_default());
        y.push(b.unwrap_or_default());
    }
    Ok((x, y))
}

pub fn read_series(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    parse_series(&read(path)?).map_err(|e| match e {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Loads a model file and runs full validation.
pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let text = read(path)?;
    let model = Model::from_json(&text).map_err(|e| match e {
        ModelFileError::Syntax(e) => CliError::Usage(format!("{}: {e}", path.display())),
        ModelFileError::Invalid(e) => CliError::Model(format!("{}: {e} [{e:?}]", path.display())),
    })?;
    model
        .validate()
        .map_err(|e| CliError::Model(format!("{}: {e} [{e:?}]", path.display())))?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_detection_and_blank_lines() {
        let (x, y) = parse_series("x,y\n1,2\n\n3, 4\n").unwrap();
        assert_eq!((x, y), (vec![1.0, 3.0], vec![2.0, 4.0]));
        let (x, _) = parse_series("1,2\n3,4\n").unwrap();
        assert_eq!(x, vec![1.0, 3.0]);
        let (x, _) = parse_series("1,2,extra\n3,4,more\n").unwrap();
        assert_eq!(x.len(), 2);
    }

    #[test]
    fn bad_cells_name_the_line() {
        let e = parse_series("x,y\n1,2\n3,abc\n").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("abc"), "{e}");
        let e = parse_series("1,2\n3\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }
}
