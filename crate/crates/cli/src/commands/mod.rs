pub mod assemble;
pub mod evaluate;
pub mod gcf;
pub mod rewrite;
pub mod serve;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub(crate) fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("{}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}
