use std::io::Write;
use std::path::Path;

use wtw::{Error, Result};

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = path
                .parent()
                .filter(|d| !d.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
            log::info!("wrote {}", path.display());
            Ok(())
        }
    }
}
