//! Generated fake contexts and their edit traces, stored as JSONL.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rewrite::EditTrace;
use crate::squad::{Paragraph, Provenance};

pub const FAKES_FORMAT: &str = "contraqa-fakes";
pub const FAKES_VERSION: u32 = 1;

/// One fake paragraph derived from the real paragraph `paragraph_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FakeRecord {
    pub paragraph_id: String,
    pub fake_index: usize,
    pub text: String,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<EditTrace>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub zero_edit: bool,
}

impl FakeRecord {
    pub fn new(paragraph_id: &str, fake_index: usize, text: String, provenance: Provenance) -> Self {
        FakeRecord {
            paragraph_id: paragraph_id.to_string(),
            fake_index,
            text,
            provenance: provenance.name().to_string(),
            k: provenance.k(),
            traces: Vec::new(),
            zero_edit: false,
        }
    }

    pub fn provenance(&self) -> Result<Provenance> {
        Provenance::from_parts(&self.provenance, self.k)
    }

    pub fn to_paragraph(&self) -> Result<Paragraph> {
        let provenance = self.provenance()?;
        if provenance.is_real() {
            return Err(Error::Contract(format!(
                "fake {} of {} is labelled real",
                self.fake_index, self.paragraph_id
            )));
        }
        Paragraph::new(self.text.clone(), provenance)
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

pub struct FakeWriter<W: Write> {
    out: W,
}

impl<W: Write> FakeWriter<W> {
    pub fn new(mut out: W, meta: Option<serde_json::Value>) -> Result<Self> {
        let header = Header {
            format: FAKES_FORMAT.into(),
            version: FAKES_VERSION,
            meta,
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n").map_err(|e| Error::io("<fakes>", e))?;
        Ok(FakeWriter { out })
    }

    pub fn write(&mut self, record: &FakeRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n").map_err(|e| Error::io("<fakes>", e))
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush().map_err(|e| Error::io("<fakes>", e))?;
        Ok(self.out)
    }
}

pub fn create_fakes(path: impl AsRef<Path>, meta: Option<serde_json::Value>) -> Result<FakeWriter<BufWriter<File>>> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    FakeWriter::new(BufWriter::new(file), meta)
}

/// Read fake records. The header line is optional so that hand-written and
/// annotation-service files can be consumed directly.
pub fn parse_fakes(input: impl BufRead) -> Result<Vec<FakeRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<fakes>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Format {
            offset: e.column(),
            message: format!("line {}: {e}", i + 1),
        })?;
        if value.get("format").is_some() {
            let header: Header = serde_json::from_value(value)?;
            if header.format != FAKES_FORMAT {
                return Err(Error::Contract(format!("not a fakes file: {}", header.format)));
            }
            if header.version != FAKES_VERSION {
                return Err(Error::Version {
                    found: header.version,
                    expected: FAKES_VERSION,
                });
            }
            continue;
        }
        out.push(serde_json::from_value(value)?);
    }
    Ok(out)
}

pub fn read_fakes(path: impl AsRef<Path>) -> Result<Vec<FakeRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_fakes(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::EditStep;

    #[test]
    fn round_trip_with_traces() {
        let mut r = FakeRecord::new("abcd", 1, "Fake text.".into(), Provenance::ModelFake { k: 2 });
        r.traces.push(EditTrace {
            sentence_index: 0,
            steps: vec![EditStep {
                iteration: 1,
                span: (0, 4),
                label: "NP".into(),
                original: "Real".into(),
                replacement: "Fake".into(),
                retries_used: 0,
            }],
        });
        let mut w = FakeWriter::new(Vec::new(), None).unwrap();
        w.write(&r).unwrap();
        let bytes = w.finish().unwrap();
        let back = parse_fakes(&bytes[..]).unwrap();
        assert_eq!(back, vec![r.clone()]);
        assert_eq!(back[0].provenance().unwrap(), Provenance::ModelFake { k: 2 });
    }

    #[test]
    fn headerless_and_version_checked() {
        let line = r#"{"paragraph_id":"x","fake_index":0,"text":"T.","provenance":"human_fake"}"#;
        assert_eq!(parse_fakes(line.as_bytes()).unwrap().len(), 1);
        let bad = "{\"format\":\"contraqa-fakes\",\"version\":9}\n";
        assert!(matches!(parse_fakes(bad.as_bytes()), Err(Error::Version { found: 9, .. })));
    }

    #[test]
    fn real_label_rejected() {
        let r = FakeRecord::new("x", 0, "T.".into(), Provenance::Real);
        assert!(r.to_paragraph().is_err());
    }
}
