//! Regenerates the bundled data files from the built-in constructors.
//! Run from the workspace root: `cargo run -p tcs-forge-core --example gen_data`

use std::fs;
use std::path::PathBuf;

use tcs_forge_core::chart::{dcover_block, dcover_fano, p1xp2_block, p1xp2_fano};
use tcs_forge_core::matching::{ConfigurationJson, N0Json};
use tcs_forge_core::lattice::LatticeJson;

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, text: String| {
        fs::write(dir.join(name), text + "\n").unwrap();
        println!("wrote {name}");
    };

    write(
        "p1xp2_fano.json",
        serde_json::to_string_pretty(&p1xp2_fano().to_json().unwrap()).unwrap(),
    );
    write(
        "dcover_fano.json",
        serde_json::to_string_pretty(&dcover_fano().to_json().unwrap()).unwrap(),
    );
    write(
        "p1xp2_block.json",
        serde_json::to_string_pretty(&p1xp2_block().to_json().unwrap()).unwrap(),
    );
    write(
        "dcover_block.json",
        serde_json::to_string_pretty(&dcover_block().to_json().unwrap()).unwrap(),
    );

    let matching = ConfigurationJson {
        schema_version: 1,
        np: LatticeJson {
            rank: 2,
            gram: vec![vec![0, 3], vec![3, 2]],
            basis_names: Some(vec!["A+".into(), "B+".into()]),
        },
        nm: LatticeJson {
            rank: 2,
            gram: vec![vec![0, 4], vec![4, 2]],
            basis_names: Some(vec!["A-".into(), "B-".into()]),
        },
        n0: N0Json {
            gram: vec![vec![-72]],
            embed_p: vec![vec![5, -3]],
            embed_m: vec![vec![5, -2]],
        },
        amp_p: vec![vec![-2, 3], vec![1, 0]],
        amp_m: vec![vec![-1, 2], vec![1, 0]],
        ample_p: vec![1, 1],
        ample_m: vec![2, 1],
    };
    write(
        "matching_neg72.json",
        serde_json::to_string_pretty(&matching).unwrap(),
    );

    let search = serde_json::json!({
        "schema_version": 1,
        "chart_p": "p1xp2_block.json",
        "chart_m": "dcover_block.json",
        "config": "matching_neg72.json",
        "k": 1,
        "box": 2,
        "curve_classes_m": ["h"]
    });
    write(
        "search_paper.json",
        serde_json::to_string_pretty(&search).unwrap(),
    );

    let attested = serde_json::json!({
        "schema_version": 1,
        "plus": {
            "h0_e": 1,
            "conormal_split": [0, -1],
            "h1_lstar_zero": true,
            "h2_lstar_zero": true,
            "h1_e_zero": true,
            "provenance": "hand cohomology computation: structure sequences on the exceptional divisor of the plus block"
        },
        "minus": {
            "h0_e": 2,
            "conormal_split": [0, 0],
            "h1_lstar_zero": true,
            "h2_lstar_zero": true,
            "h1_e_zero": true,
            "provenance": "hand cohomology computation: conormal sequence through the double-cover surface containing the line"
        }
    });
    write(
        "attested_paper.json",
        serde_json::to_string_pretty(&attested).unwrap(),
    );
}
