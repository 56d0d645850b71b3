//! File formats: CAMT tensors, binary netpbm rasters, box CSV.

pub mod boxes;
pub mod camt;
pub mod pnm;

pub use boxes::{read_boxes, write_boxes, BBox, BoxCsvError, BoxRecord, CSV_HEADER};
pub use camt::{read_camt, write_camt, CamtData, CamtError, CamtTensor, Dtype};
pub use pnm::{read_pgm, write_pgm, write_ppm, GrayImage, PnmError, RgbImage};
