//! Minimal legacy-VTK ASCII reader, independent of the writer.

use std::collections::BTreeMap;

#[derive(Debug, Default)]
pub struct LegacyVtk {
    pub title: String,
    pub dataset: String,
    pub points: Vec<[f64; 3]>,
    pub vertices: Vec<usize>,
    pub dims: Option<[usize; 3]>,
    pub origin: Option<[f64; 3]>,
    pub spacing: Option<[f64; 3]>,
    pub point_data: usize,
    pub scalars: BTreeMap<String, Vec<f64>>,
    pub vectors: BTreeMap<String, Vec<[f64; 3]>>,
}

struct Tokens<'a> {
    inner: std::iter::Peekable<std::str::SplitWhitespace<'a>>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Result<&'a str, String> {
        self.inner.next().ok_or_else(|| "unexpected end of file".to_string())
    }

    fn expect(&mut self, word: &str) -> Result<(), String> {
        let t = self.next()?;
        if t == word {
            Ok(())
        } else {
            Err(format!("expected {word}, found {t}"))
        }
    }

    fn num<T: std::str::FromStr>(&mut self) -> Result<T, String> {
        let t = self.next()?;
        t.parse().map_err(|_| format!("bad number {t}"))
    }

    fn triple(&mut self) -> Result<[f64; 3], String> {
        Ok([self.num()?, self.num()?, self.num()?])
    }
}

pub fn parse(text: &str) -> Result<LegacyVtk, String> {
    let mut lines = text.splitn(4, '\n');
    if lines.next() != Some("# vtk DataFile Version 3.0") {
        return Err("missing version header".into());
    }
    let mut out = LegacyVtk {
        title: lines.next().ok_or("missing title")?.to_string(),
        ..Default::default()
    };
    if lines.next().map(str::trim) != Some("ASCII") {
        return Err("only ASCII files are supported".into());
    }
    let mut t = Tokens {
        inner: lines.next().unwrap_or("").split_whitespace().peekable(),
    };
    t.expect("DATASET")?;
    out.dataset = t.next()?.to_string();
    match out.dataset.as_str() {
        "POLYDATA" => {
            t.expect("POINTS")?;
            let n: usize = t.num()?;
            t.next()?;
            for _ in 0..n {
                out.points.push(t.triple()?);
            }
            if t.inner.peek() == Some(&"VERTICES") {
                t.next()?;
                let cells: usize = t.num()?;
                let size: usize = t.num()?;
                if size != 2 * cells {
                    return Err("only single-point vertex cells are supported".into());
                }
                for _ in 0..cells {
                    t.expect("1")?;
                    out.vertices.push(t.num()?);
                }
            }
        }
        "STRUCTURED_POINTS" => {
            for _ in 0..3 {
                match t.next()? {
                    "DIMENSIONS" => out.dims = Some([t.num()?, t.num()?, t.num()?]),
                    "ORIGIN" => out.origin = Some(t.triple()?),
                    "SPACING" => out.spacing = Some(t.triple()?),
                    other => return Err(format!("unexpected {other}")),
                }
            }
        }
        other => return Err(format!("unsupported dataset {other}")),
    }
    t.expect("POINT_DATA")?;
    out.point_data = t.num()?;
    while let Some(kind) = t.inner.next() {
        let name = t.next()?.to_string();
        t.next()?;
        match kind {
            "SCALARS" => {
                if t.inner.peek() != Some(&"LOOKUP_TABLE") {
                    t.num::<usize>()?;
                }
                t.expect("LOOKUP_TABLE")?;
                t.next()?;
                let values = (0..out.point_data).map(|_| t.num()).collect::<Result<_, _>>()?;
                out.scalars.insert(name, values);
            }
            "VECTORS" => {
                let values = (0..out.point_data).map(|_| t.triple()).collect::<Result<_, _>>()?;
                out.vectors.insert(name, values);
            }
            other => return Err(format!("unsupported attribute {other}")),
        }
    }
    let expected = match out.dims {
        Some(d) => d.iter().product(),
        None => out.points.len(),
    };
    if expected != out.point_data {
        return Err(format!("POINT_DATA {} but geometry has {expected} points", out.point_data));
    }
    Ok(out)
}

pub fn read(path: &std::path::Path) -> Result<LegacyVtk, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text)
}
