//! The JSON files under `models/` must match the built-in fixtures.
//! Run with `OPDEP_BLESS=1` to regenerate them.

use std::path::PathBuf;

use opdep::density::{Axis, Block, Cell, PiecewiseUniformDensity};
use opdep::model_file::Model;
use opdep::scenarios::*;

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn independent_product() -> PiecewiseUniformDensity {
    PiecewiseUniformDensity::new(
        2,
        vec![Cell::new(
            vec![
                Block::free(Axis::X, &[1, 2], 0.0, 1.0).unwrap(),
                Block::free(Axis::Y, &[1, 2], 0.0, 1.0).unwrap(),
            ],
            1.0,
        )
        .unwrap()],
    )
    .unwrap()
}

fn fixtures() -> Vec<(&'static str, Model)> {
    let ce = build_counterexample();
    let (head, head_star) = table1_heads();
    let (cont_head, cont_head_star) = example42_continuous_heads();
    let (cont, cont_star) = example42_continuous(&example42_continuous_tail()).unwrap();
    let ex42 = example42_pair(&example42_tail()).unwrap();
    let ex43 = example43_pair(EXAMPLE43_C1, EXAMPLE43_C2).unwrap();
    vec![
        ("f.json", Model::Piecewise(ce.f)),
        ("f_star.json", Model::Piecewise(ce.f_star)),
        ("independent.json", Model::Piecewise(independent_product())),
        ("example42_head.json", Model::Discrete(head)),
        ("example42_head_star.json", Model::Discrete(head_star)),
        ("example42_discrete.json", Model::Discrete(ex42.first())),
        ("example42_discrete_star.json", Model::Discrete(ex42.second())),
        ("example42_continuous_head.json", Model::Piecewise(cont_head)),
        ("example42_continuous_head_star.json", Model::Piecewise(cont_head_star)),
        ("example42_continuous.json", Model::Piecewise(cont)),
        ("example42_continuous_star.json", Model::Piecewise(cont_star)),
        ("example43.json", Model::Discrete(ex43.first())),
        ("example43_star.json", Model::Discrete(ex43.second())),
    ]
}

#[test]
fn shipped_models_match_fixtures() {
    let bless = std::env::var_os("OPDEP_BLESS").is_some();
    for (name, model) in fixtures() {
        let path = models_dir().join(name);
        if bless {
            std::fs::write(&path, model.to_json() + "\n").unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let loaded = Model::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(loaded, model, "{name}");
        loaded.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
