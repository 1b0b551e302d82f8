//! Download-once dataset cache with recorded SHA-256 digests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::loader::{parse_table, CsvOptions, Table};

pub const EPILEPSY_URL: &str = "https://archive.ics.uci.edu/ml/machine-learning-databases/00388/data.csv";
pub const EPILEPSY_FILE: &str = "epileptic_seizure_recognition.csv";
pub const CACHE_DIR_ENV: &str = "RPENS_CACHE_DIR";
pub const URL_ENV: &str = "RPENS_EPILEPSY_URL";

/// Data rows in the epileptic seizure recognition table.
pub const EPILEPSY_ROWS: usize = 11500;
/// Columns other than the label: one identifier plus 178 EEG readings.
pub const EPILEPSY_NON_LABEL_COLUMNS: usize = 179;
pub const EPILEPSY_FEATURES: usize = 178;

pub trait Downloader {
    fn get(&self, url: &str) -> Result<Vec<u8>>;
}

/// Blocking HTTP(S) GET.
#[derive(Debug, Clone)]
pub struct HttpDownloader {
    pub max_bytes: u64,
}

impl Default for HttpDownloader {
    fn default() -> Self {
        Self { max_bytes: 256 * 1024 * 1024 }
    }
}

impl Downloader for HttpDownloader {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        let mut response = ureq::get(url).call().map_err(|e| HarnessError::Network(format!("{url}: {e}")))?;
        response
            .body_mut()
            .with_config()
            .limit(self.max_bytes)
            .read_to_vec()
            .map_err(|e| HarnessError::Network(format!("{url}: {e}")))
    }
}

/// A cached file together with the options needed to parse it.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub path: PathBuf,
    pub sha256: String,
    pub options: CsvOptions,
    /// Whether this call downloaded the file.
    pub downloaded: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn default_cache_dir() -> PathBuf {
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => std::env::temp_dir().join("rpens-cache"),
    }
}

fn digest_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".sha256");
    path.with_file_name(name)
}

fn read_recorded_digest(path: &Path) -> Result<Option<String>> {
    let dp = digest_path(path);
    if !dp.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&dp).map_err(|e| HarnessError::io(&dp, e))?;
    Ok(text.split_whitespace().next().map(str::to_ascii_lowercase))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

/// Return `cache_dir/file_name`, downloading it from `url` if absent.
///
/// The digest of the first successful download is written next to the file.
/// Later calls verify the cached file (or a re-download) against that digest,
/// and against `expected_sha256` when given. `validate` runs on the bytes
/// before anything is written to the cache.
pub fn fetch_cached(
    cache_dir: &Path,
    file_name: &str,
    url: &str,
    expected_sha256: Option<&str>,
    downloader: &dyn Downloader,
    validate: &dyn Fn(&[u8]) -> Result<()>,
) -> Result<(PathBuf, String, bool)> {
    std::fs::create_dir_all(cache_dir).map_err(|e| HarnessError::io(cache_dir, e))?;
    let path = cache_dir.join(file_name);
    let recorded = read_recorded_digest(&path)?;
    let expected = expected_sha256.map(str::to_ascii_lowercase).or(recorded.clone());
    let check = |found: &str| -> Result<()> {
        match &expected {
            Some(e) if e != found => Err(HarnessError::ChecksumMismatch {
                path: path.clone(),
                expected: e.clone(),
                found: found.to_string(),
            }),
            _ => Ok(()),
        }
    };

    if path.exists() {
        let bytes = std::fs::read(&path).map_err(|e| HarnessError::io(&path, e))?;
        let found = sha256_hex(&bytes);
        check(&found)?;
        if recorded.is_none() {
            validate(&bytes)?;
            write(&digest_path(&path), format!("{found}  {file_name}\n").as_bytes())?;
        }
        return Ok((path, found, false));
    }

    let bytes = downloader.get(url)?;
    let found = sha256_hex(&bytes);
    check(&found)?;
    validate(&bytes)?;
    write(&path, &bytes)?;
    write(&digest_path(&path), format!("{found}  {file_name}\n").as_bytes())?;
    Ok((path, found, true))
}

/// Parsing options for the epilepsy table: header row, identifier column
/// dropped, class 1 (seizure) kept and classes 2 to 5 merged into class 0.
pub fn epilepsy_csv_options() -> CsvOptions {
    let mut map = BTreeMap::new();
    map.insert("1".to_string(), 1);
    for r in 2..=5 {
        map.insert(r.to_string(), 0);
    }
    CsvOptions { label_column: Some(-1), header: true, delimiter: ',', label_map: Some(map), drop_non_numeric: true }
}

/// Check the table has the published layout.
pub fn check_epilepsy_layout(table: &Table) -> Result<()> {
    if table.rows() != EPILEPSY_ROWS {
        return Err(HarnessError::DatasetShape(format!("{} data rows, expected {EPILEPSY_ROWS}", table.rows())));
    }
    if table.raw_columns != EPILEPSY_NON_LABEL_COLUMNS + 1 {
        return Err(HarnessError::DatasetShape(format!(
            "{} columns, expected {} plus a label",
            table.raw_columns, EPILEPSY_NON_LABEL_COLUMNS
        )));
    }
    if table.p != EPILEPSY_FEATURES {
        return Err(HarnessError::DatasetShape(format!(
            "{} numeric feature columns, expected {EPILEPSY_FEATURES}",
            table.p
        )));
    }
    Ok(())
}

pub fn fetch_epilepsy_dataset(
    cache_dir: &Path,
    url: &str,
    expected_sha256: Option<&str>,
    downloader: &dyn Downloader,
) -> Result<DatasetFile> {
    let options = epilepsy_csv_options();
    let validate = |bytes: &[u8]| check_epilepsy_layout(&parse_table(bytes, &options)?);
    let (path, sha256, downloaded) =
        fetch_cached(cache_dir, EPILEPSY_FILE, url, expected_sha256, downloader, &validate)?;
    Ok(DatasetFile { path, sha256, options, downloaded })
}

/// The URL to fetch from, honouring the override environment variable.
pub fn epilepsy_url() -> String {
    std::env::var(URL_ENV).unwrap_or_else(|_| EPILEPSY_URL.to_string())
}
