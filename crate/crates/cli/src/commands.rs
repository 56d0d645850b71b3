use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use lesioncam::cam::{ActivationMap, CamError, ClassWeights, FeatureTensor, GradientTensor};
use lesioncam::io::{
    read_boxes, read_camt, read_pgm, write_boxes, write_camt, write_ppm, BoxRecord,
};
use lesioncam::pipeline::{cam_map, detect as detect_map, gradcam_map, DetectConfig, MapSize};
use lesioncam::{evaluate, mask_to_gt_boxes, BinaryMask, EvalConfig};
use rayon::prelude::*;

use crate::error::CliError;
use crate::overlay;

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

/// File name up to its first dot: `leaf_01.map.camt` -> `leaf_01`.
pub fn image_id(path: &Path) -> Result<String, CliError> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CliError::format(path, "file name is not valid UTF-8"))?;
    let id = name.split('.').next().unwrap_or(name);
    if id.is_empty() || id.contains(',') {
        return Err(CliError::format(
            path,
            format!("cannot derive an image id from {name:?}"),
        ));
    }
    Ok(id.to_string())
}

/// Regular files in `dir` with the given extension, sorted by name.
fn list_dir(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn load_camt(path: &Path) -> Result<lesioncam::io::CamtTensor, CliError> {
    read_camt(&read_file(path)?).map_err(|e| CliError::format(path, e))
}

fn tensor_error(path: &Path, e: CamError) -> CliError {
    match e {
        CamError::ShapeMismatch(msg) => CliError::Shape(format!("{}: {msg}", path.display())),
        other => CliError::format(path, other),
    }
}

fn load_map(path: &Path) -> Result<ActivationMap, CliError> {
    ActivationMap::from_camt(&load_camt(path)?).map_err(|e| tensor_error(path, e))
}

fn load_boxes(path: &Path) -> Result<Vec<BoxRecord>, CliError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::format(path, e))?;
    read_boxes(&text).map_err(|e| CliError::format(path, e))
}

fn boxes_csv(records: &[BoxRecord]) -> Result<String, CliError> {
    write_boxes(records).map_err(|e| CliError::format(Path::new("<output>"), e))
}

pub fn cam(
    features: &Path,
    weights: &Path,
    out: &Path,
    relu: bool,
    size: MapSize,
) -> Result<(), CliError> {
    let f =
        FeatureTensor::from_camt(&load_camt(features)?).map_err(|e| tensor_error(features, e))?;
    let w = ClassWeights::from_camt(&load_camt(weights)?).map_err(|e| tensor_error(weights, e))?;
    let map = cam_map(&f, &w, relu, size).map_err(|e| tensor_error(weights, e))?;
    write_file(out, &write_camt(&map.to_camt()))
}

pub fn gradcam(
    features: &Path,
    grads: &Path,
    out: &Path,
    relu: bool,
    size: MapSize,
) -> Result<(), CliError> {
    let f =
        FeatureTensor::from_camt(&load_camt(features)?).map_err(|e| tensor_error(features, e))?;
    let g = GradientTensor::from_camt(&load_camt(grads)?).map_err(|e| tensor_error(grads, e))?;
    let map = gradcam_map(&f, &g, relu, size).map_err(|e| tensor_error(grads, e))?;
    write_file(out, &write_camt(&map.to_camt()))
}

/// Loads one map file, or every `*.camt` in a directory, as `(image_id, map)`.
fn load_maps(path: &Path) -> Result<Vec<(String, ActivationMap)>, CliError> {
    let files = if path.is_dir() {
        list_dir(path, "camt")?
    } else {
        vec![path.to_path_buf()]
    };
    files
        .par_iter()
        .map(|p| Ok((image_id(p)?, load_map(p)?)))
        .collect()
}

fn detect_all(maps: &[(String, ActivationMap)], cfg: &DetectConfig) -> Vec<BoxRecord> {
    maps.par_iter()
        .map(|(id, map)| detect_map(map, id, cfg))
        .collect::<Vec<_>>()
        .concat()
}

pub fn detect(map: &Path, out: Option<&Path>, cfg: &DetectConfig) -> Result<(), CliError> {
    let maps = load_maps(map)?;
    write_or_print(out, &boxes_csv(&detect_all(&maps, cfg))?)
}

pub fn convert_masks(dir: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let mut records = Vec::new();
    for path in list_dir(dir, "pgm")? {
        let image = read_pgm(&read_file(&path)?).map_err(|e| CliError::format(&path, e))?;
        let id = image_id(&path)?;
        records.extend(mask_to_gt_boxes(&BinaryMask::from_gray(&image), &id));
    }
    write_or_print(out, &boxes_csv(&records)?)
}

pub fn eval(gt: &Path, det: &Path, out: Option<&Path>, cfg: &EvalConfig) -> Result<(), CliError> {
    let gts = load_boxes(gt)?;
    let dets = load_boxes(det)?;
    let report = evaluate(&dets, &gts, cfg)?;
    print!("{report}");
    if let Some(path) = out {
        write_file(path, report.to_toml().as_bytes())?;
    }
    Ok(())
}

pub fn overlay(
    image: &Path,
    out: &Path,
    gt: Option<&Path>,
    det: Option<&Path>,
) -> Result<(), CliError> {
    let base = read_pgm(&read_file(image)?).map_err(|e| CliError::format(image, e))?;
    let id = image_id(image)?;
    let boxes_for = |path: Option<&Path>| -> Result<Vec<_>, CliError> {
        Ok(match path {
            Some(p) => load_boxes(p)?
                .into_iter()
                .filter(|r| r.image_id == id)
                .map(|r| r.bbox)
                .collect(),
            None => Vec::new(),
        })
    };
    let rendered = overlay::render(&base, &boxes_for(gt)?, &boxes_for(det)?);
    write_file(out, &write_ppm(&rendered))
}

pub fn sweep(
    maps_dir: &Path,
    gt: &Path,
    mut grid: Vec<DetectConfig>,
    eval_cfg: &EvalConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if !maps_dir.is_dir() {
        return Err(CliError::io(
            maps_dir,
            std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "expected a directory of maps",
            ),
        ));
    }
    let gts = load_boxes(gt)?;
    let maps = load_maps(maps_dir)?;

    let key = |c: &DetectConfig| (c.threshold.t_floor(), c.size_filter.min_area_px());
    grid.sort_by(|a, b| key(a).0.total_cmp(&key(b).0).then(key(a).1.cmp(&key(b).1)));
    grid.dedup_by(|a, b| key(a) == key(b));

    let rows: Vec<_> = grid
        .par_iter()
        .map(|cfg| {
            let dets = detect_all(&maps, cfg);
            evaluate(&dets, &gts, eval_cfg).map(|r| (key(cfg), r.ap, r.success_rate))
        })
        .collect::<Result<_, _>>()?;

    let mut text = String::from("t_floor,min_area,ap,success_rate\n");
    for ((t, a), ap, sr) in rows {
        text.push_str(&format!("{t},{a},{ap},{sr}\n"));
    }
    write_or_print(out, &text)
}
