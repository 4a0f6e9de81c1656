use super::{read_file, write_file, FormatError};
use std::path::Path;
use swarmgail_core::sim::ArenaSpec;

pub fn save_arena(arena: &ArenaSpec, path: &Path) -> Result<(), FormatError> {
    write_file(path, &arena.to_text())
}

pub fn load_arena(path: &Path) -> Result<ArenaSpec, FormatError> {
    Ok(ArenaSpec::parse(&read_file(path)?)?)
}
