use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Output directory; every file goes through a temporary sibling and a
/// rename so that no reader sees a partial file.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|source| CliError::Io { path: root.into(), source })?;
        Ok(Self { root: root.into() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn subdir(&self, name: &str) -> Result<Self, CliError> {
        Self::create(&self.root.join(name))
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let tmp = self.path(&format!(".{name}.{}.tmp", std::process::id()));
        let io = |source| CliError::Io { path: path.clone(), source };
        let result = (|| {
            let mut f = File::create(&tmp)?;
            f.write_all(contents.as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result.map_err(io)?;
        Ok(path)
    }

    /// Timestamps live here and nowhere else, so the other outputs stay
    /// byte-identical between runs.
    pub fn log(&self, line: &str) {
        let stamp =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let opened = fs::OpenOptions::new().create(true).append(true).open(self.path("run.log"));
        if let Ok(mut f) = opened {
            let _ = writeln!(f, "{stamp} {line}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_leave_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutDir::create(&dir.path().join("a/b")).unwrap();
        out.write("x.txt", "one").unwrap();
        out.write("x.txt", "two").unwrap();
        assert_eq!(fs::read_to_string(out.path("x.txt")).unwrap(), "two");
        let names: Vec<_> =
            fs::read_dir(dir.path().join("a/b")).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }
}
