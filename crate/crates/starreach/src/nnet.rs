//! Plain-text NNet network format: `//` comment lines, a header
//! `numLayers,inputSize,outputSize,maxLayerSize,`, the layer sizes, one unused
//! flag line, input minimums, input maximums, means, ranges, then per layer
//! the weight rows followed by one bias per line.

use std::fmt::Write as _;

use starreach_core::linalg::Matrix;
use starreach_core::nn::{Activation, Ffnn, Layer};
use starreach_core::set::{HalfspacePolytope, Star};

use crate::error::{Error, Result};

/// Network plus the normalization constants shipped with it. `means` and
/// `ranges` hold one entry per input followed by one shared output entry.
#[derive(Clone, Debug, PartialEq)]
pub struct NnetFile {
    pub network: Ffnn,
    pub input_min: Vec<f64>,
    pub input_max: Vec<f64>,
    pub means: Vec<f64>,
    pub ranges: Vec<f64>,
    pub comments: Vec<String>,
}

struct Lines<'a> {
    iter: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { iter: text.lines().enumerate().peekable(), last: 0 }
    }

    fn comments(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some((_, l)) = self.iter.peek() {
            match l.trim_start().strip_prefix("//") {
                Some(c) => out.push(c.trim().to_string()),
                None if l.trim().is_empty() => {}
                None => break,
            }
            self.iter.next();
        }
        out
    }

    /// Next nonblank line split into numbers.
    fn numbers(&mut self, section: &str) -> Result<(usize, Vec<f64>)> {
        loop {
            let Some((i, l)) = self.iter.next() else {
                return Err(Error::Parse { line: self.last + 1, message: format!("missing {section}") });
            };
            self.last = i + 1;
            if l.trim().is_empty() {
                continue;
            }
            let vals = l
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Parse { line: i + 1, message: format!("bad number `{t}` in {section}") })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((i + 1, vals));
        }
    }

    fn exact(&mut self, section: &str, n: usize) -> Result<Vec<f64>> {
        let (line, v) = self.numbers(section)?;
        if v.len() < n {
            return Err(Error::Parse { line, message: format!("{section}: expected {n} values, found {}", v.len()) });
        }
        if v.len() > n {
            return Err(Error::Shape(format!("line {line}: {section} has {} values, expected {n}", v.len())));
        }
        Ok(v)
    }
}

fn count(line: usize, v: f64, what: &str) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(Error::Parse { line, message: format!("{what} must be a nonnegative integer, found {v}") })
    }
}

pub fn parse_nnet(text: &str) -> Result<NnetFile> {
    let mut lines = Lines::new(text);
    let comments = lines.comments();
    let (line, header) = lines.numbers("header")?;
    if header.len() < 3 {
        return Err(Error::Parse { line, message: "header needs numLayers,inputSize,outputSize".into() });
    }
    let num_layers = count(line, header[0], "numLayers")?;
    let n_in = count(line, header[1], "inputSize")?;
    let n_out = count(line, header[2], "outputSize")?;
    if num_layers == 0 {
        return Err(Error::Shape("network needs at least one layer".into()));
    }
    let (line, raw) = lines.numbers("layer sizes")?;
    let sizes = raw.iter().map(|v| count(line, *v, "layer size")).collect::<Result<Vec<_>>>()?;
    if sizes.len() != num_layers + 1 {
        return Err(Error::Shape(format!("line {line}: {} layer sizes for {num_layers} layers", sizes.len())));
    }
    if sizes[0] != n_in || sizes[num_layers] != n_out {
        return Err(Error::Shape(format!("line {line}: layer sizes disagree with the header")));
    }
    lines.numbers("flag line")?;
    let input_min = lines.exact("input minimums", n_in)?;
    let input_max = lines.exact("input maximums", n_in)?;
    let means = lines.exact("means", n_in + 1)?;
    let ranges = lines.exact("ranges", n_in + 1)?;

    let mut layers = Vec::with_capacity(num_layers);
    for l in 0..num_layers {
        let (rows, cols) = (sizes[l + 1], sizes[l]);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            data.extend(lines.exact(&format!("layer {l} weight row {r}"), cols)?);
        }
        let mut bias = Vec::with_capacity(rows);
        for r in 0..rows {
            bias.extend(lines.exact(&format!("layer {l} bias {r}"), 1)?);
        }
        let act = if l + 1 == num_layers { Activation::Linear } else { Activation::ReLU };
        layers.push(Layer::new(Matrix::from_vec(rows, cols, data)?, bias, act)?);
    }
    Ok(NnetFile { network: Ffnn::new(layers)?, input_min, input_max, means, ranges, comments })
}

fn row(out: &mut String, vals: &[f64]) {
    for v in vals {
        let _ = write!(out, "{v:?},");
    }
    out.push('\n');
}

pub fn serialize_nnet(file: &NnetFile) -> Result<String> {
    let net = &file.network;
    let layers = net.layers();
    for (l, layer) in layers.iter().enumerate() {
        let want = if l + 1 == layers.len() { Activation::Linear } else { Activation::ReLU };
        if layer.activation() != want {
            return Err(Error::Shape(format!("layer {l} activation {:?} cannot be written as NNet", layer.activation())));
        }
    }
    let n_in = net.input_dim();
    if file.input_min.len() != n_in || file.input_max.len() != n_in {
        return Err(Error::Shape("input bounds need one entry per input".into()));
    }
    if file.means.len() != n_in + 1 || file.ranges.len() != n_in + 1 {
        return Err(Error::Shape("means and ranges need one entry per input plus one".into()));
    }
    let mut sizes = vec![n_in];
    sizes.extend(layers.iter().map(Layer::output_dim));
    let mut out = String::new();
    for c in &file.comments {
        let _ = writeln!(out, "// {c}");
    }
    let max = sizes.iter().max().copied().unwrap_or(0);
    let _ = writeln!(out, "{},{},{},{},", layers.len(), n_in, net.output_dim(), max);
    for s in &sizes {
        let _ = write!(out, "{s},");
    }
    out.push_str("\n0,\n");
    row(&mut out, &file.input_min);
    row(&mut out, &file.input_max);
    row(&mut out, &file.means);
    row(&mut out, &file.ranges);
    for layer in layers {
        for r in 0..layer.output_dim() {
            row(&mut out, layer.weight().row(r));
        }
        for b in layer.bias() {
            row(&mut out, &[*b]);
        }
    }
    Ok(out)
}

impl NnetFile {
    /// Wraps a network with identity normalization and unbounded input
    /// limits.
    pub fn from_network(network: Ffnn) -> Self {
        let n = network.input_dim();
        Self {
            input_min: vec![f64::MIN; n],
            input_max: vec![f64::MAX; n],
            means: vec![0.0; n + 1],
            ranges: vec![1.0; n + 1],
            network,
            comments: vec![],
        }
    }

    /// Maps an input set stated in raw coordinates to the normalized
    /// coordinates the network consumes: clip to the input limits, then
    /// `(x - mean) / range`.
    pub fn normalize_input(&self, input: &Star) -> Result<Star> {
        let n = self.network.input_dim();
        if input.dim() != n {
            return Err(starreach_core::Error::DimensionMismatch { context: "input set", expected: n, found: input.dim() }.into());
        }
        let mut clipped = input.clone();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            if self.input_max[i] < f64::MAX {
                clipped = clipped.intersect_halfspace(&e, self.input_max[i])?;
            }
            e[i] = -1.0;
            if self.input_min[i] > f64::MIN {
                clipped = clipped.intersect_halfspace(&e, -self.input_min[i])?;
            }
        }
        let scale: Vec<f64> = self.ranges[..n].iter().map(|r| 1.0 / r).collect();
        let shift: Vec<f64> = (0..n).map(|i| -self.means[i] / self.ranges[i]).collect();
        Ok(clipped.affine_map(&Matrix::from_diagonal(&scale), &shift)?)
    }

    /// Restates an unsafe region given over raw outputs in terms of the
    /// network's normalized outputs `y`, where raw `= range * y + mean`.
    pub fn normalize_output_region(&self, region: &HalfspacePolytope) -> Result<HalfspacePolytope> {
        let n = self.network.input_dim();
        let (m, r) = (self.means[n], self.ranges[n]);
        let h = region.normals();
        let offsets: Vec<f64> =
            (0..h.rows()).map(|i| region.offsets()[i] - m * h.row(i).iter().sum::<f64>()).collect();
        Ok(HalfspacePolytope::new(h.scale(r), offsets)?)
    }
}
