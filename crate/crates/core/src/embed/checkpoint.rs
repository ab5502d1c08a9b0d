//! Plain-text embedding checkpoints.
//!
//! ```text
//! dim<TAB>5
//! vocab<TAB>63
//! curvature<TAB>-1
//! <node><TAB><x_1><TAB>...<TAB><x_n>
//! ```
//!
//! Coordinates are written with 17 significant digits so that reading a
//! checkpoint back reproduces the table exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub dim: usize,
    pub curvature: f64,
    pub names: Vec<String>,
    pub points: Vec<Vec<f64>>,
}

impl Checkpoint {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "dim\t{}", self.dim)?;
        writeln!(w, "vocab\t{}", self.names.len())?;
        writeln!(w, "curvature\t{}", self.curvature)?;
        for (name, p) in self.names.iter().zip(&self.points) {
            write!(w, "{name}")?;
            for c in p {
                write!(w, "\t{c:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let mut header = |key: &str| -> Result<String> {
            let (i, line) = lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("missing `{key}` header"),
            })?;
            let line = line?;
            match line.split_once('\t') {
                Some((k, v)) if k == key => Ok(v.trim().to_string()),
                _ => Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `{key}<TAB>value`"),
                }),
            }
        };
        let num_err = |line: usize, what: &str| Error::Parse {
            line,
            msg: format!("invalid {what}"),
        };
        let dim: usize = header("dim")?.parse().map_err(|_| num_err(1, "dim"))?;
        let vocab: usize = header("vocab")?
            .parse()
            .map_err(|_| num_err(2, "vocab size"))?;
        let curvature: f64 = header("curvature")?
            .parse()
            .map_err(|_| num_err(3, "curvature"))?;
        let mut names = Vec::with_capacity(vocab);
        let mut points = Vec::with_capacity(vocab);
        for (i, line) in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let name = fields.next().unwrap_or_default().to_string();
            let p = fields
                .map(|s| s.parse::<f64>().map_err(|_| num_err(i + 1, "coordinate")))
                .collect::<Result<Vec<_>>>()?;
            if p.len() != dim {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {dim} coordinates, found {}", p.len()),
                });
            }
            names.push(name);
            points.push(p);
        }
        if names.len() != vocab {
            return Err(Error::Parse {
                line: 2,
                msg: format!("header declares {vocab} nodes, found {}", names.len()),
            });
        }
        Ok(Self {
            dim,
            curvature,
            names,
            points,
        })
    }
}
