use std::fs;
use std::path::Path;

use eonpath::topo_format;
use eonpath::Topology;

use crate::LabError;

pub fn load(path: &Path) -> Result<Topology, LabError> {
    let text = fs::read_to_string(path).map_err(LabError::io(path))?;
    topo_format::from_text(&text).map_err(|source| LabError::Topology {
        path: path.to_owned(),
        source,
    })
}

pub fn save(topo: &Topology, path: &Path) -> Result<(), LabError> {
    fs::write(path, topo_format::to_text(topo)).map_err(LabError::io(path))
}

/// `g<vertices>_<index>`, the name used for topology files and in CSVs.
pub fn topology_name(vertices: usize, index: usize) -> String {
    format!("g{vertices}_{index}")
}
