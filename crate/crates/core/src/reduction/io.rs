//! Instance directories: `manifest.json` plus game and matrix text files.
//!
//! Loading rebuilds the instance from the manifest and checks that the
//! stored reduced game matches the regenerated one bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{write_matrix_rows, BimatrixGame};
use crate::matrix::Matrix;
use crate::reduction::instance::{build_with, BlockMap, GadgetSeeds, ReductionInstance, ReductionParams};

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceManifest {
    pub format_version: u32,
    pub params: ReductionParams,
    pub seeds: GadgetSeeds,
    pub block_map: BlockMap,
    pub persisted_noise: bool,
    pub source_file: String,
    pub reduced_file: String,
}

const NOISE_FILES: [&str; 4] = ["z0.txt", "z1.txt", "a_eps.txt", "b_eps.txt"];

pub fn matrix_to_text(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    write_matrix_rows(&mut out, m);
    out
}

pub fn matrix_from_text(text: &str) -> Result<Matrix> {
    let mut tok = text.split_whitespace();
    let mut dim = || -> Result<usize> {
        tok.next()
            .ok_or_else(|| Error::Parse("missing matrix dimension".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad matrix dimension: {e}")))
    };
    let (r, c) = (dim()?, dim()?);
    let vals = text
        .split_whitespace()
        .skip(2)
        .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad entry {t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_vec(r, c, vals)
}

pub fn save_instance(inst: &ReductionInstance, dir: &Path, persist_noise: bool) -> Result<InstanceManifest> {
    fs::create_dir_all(dir)?;
    let manifest = InstanceManifest {
        format_version: INSTANCE_FORMAT_VERSION,
        params: inst.params.clone(),
        seeds: inst.seeds,
        block_map: inst.block_map,
        persisted_noise: persist_noise,
        source_file: "source.txt".into(),
        reduced_file: "reduced.txt".into(),
    };
    fs::write(dir.join(&manifest.source_file), inst.source.to_text())?;
    fs::write(dir.join(&manifest.reduced_file), inst.reduced.to_text())?;
    if persist_noise {
        let g = &inst.gadgets;
        for (name, m) in NOISE_FILES.iter().zip([&g.z0, &g.z1, &g.a_eps, &g.b_eps]) {
            fs::write(dir.join(name), matrix_to_text(m))?;
        }
    }
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn load_instance(dir: &Path) -> Result<ReductionInstance> {
    let manifest: InstanceManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    if manifest.format_version != INSTANCE_FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported instance format {}", manifest.format_version)));
    }
    let source = BimatrixGame::from_text(&fs::read_to_string(dir.join(&manifest.source_file))?)?;
    let inst = build_with(&source, &manifest.params)?;
    let stored = BimatrixGame::from_text(&fs::read_to_string(dir.join(&manifest.reduced_file))?)?;
    if stored != inst.reduced {
        return Err(Error::Parse(format!(
            "{} does not match the game regenerated from the manifest seeds",
            manifest.reduced_file
        )));
    }
    if manifest.persisted_noise {
        let g = &inst.gadgets;
        for (name, m) in NOISE_FILES.iter().zip([&g.z0, &g.z1, &g.a_eps, &g.b_eps]) {
            if &matrix_from_text(&fs::read_to_string(dir.join(name))?)? != m {
                return Err(Error::Parse(format!("{name} does not match the regenerated noise")));
            }
        }
    }
    Ok(inst)
}
