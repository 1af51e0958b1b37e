//! On-disk cache of directed balls.
//!
//! A file holds the magic `HLBALL01`, a body of LEB128 varints (signed values
//! zigzag-encoded) and a trailing SHA-256 of everything before it. Files are
//! named by a hash of the family, step law, center and radius. A file that
//! fails to decode is deleted and the ball rebuilt.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::ball::{DirectedBall, Edge, Target};
use crate::error::{Error, Result};
use crate::group::{bs_element, GrigElement, Group, GroupElement, GroupFamily, Step, StepDistribution};

pub const MAGIC: &[u8; 8] = b"HLBALL01";

/// Environment variable naming the cache directory.
pub const CACHE_DIR_VAR: &str = "HARMLAB_CACHE_DIR";

const DIGEST_LEN: usize = 32;

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn uint(&mut self, mut v: u64) {
        loop {
            let byte = (v & 0x7f) as u8;
            v >>= 7;
            if v == 0 {
                self.buf.push(byte);
                return;
            }
            self.buf.push(byte | 0x80);
        }
    }

    fn int(&mut self, v: i64) {
        self.uint(((v << 1) ^ (v >> 63)) as u64);
    }

    fn bytes(&mut self, b: &[u8]) {
        self.uint(b.len() as u64);
        self.buf.extend_from_slice(b);
    }

    fn bigint(&mut self, v: &BigInt) {
        self.bytes(&v.to_signed_bytes_le());
    }

    fn element(&mut self, g: &GroupElement) {
        match g {
            GroupElement::Zd(v) => v.iter().for_each(|&x| self.int(x)),
            GroupElement::Free(w) => self.bytes(w),
            GroupElement::Heisenberg(c) => c.iter().for_each(|&x| self.int(x)),
            GroupElement::Lamplighter { lamps, pos } => {
                self.uint(lamps.len() as u64);
                lamps.iter().for_each(|&x| self.int(x));
                self.int(*pos);
            }
            GroupElement::Bs { exp, shift, .. } => {
                self.int(*exp);
                self.uint(shift.exponent() as u64);
                self.bigint(shift.numerator());
            }
            GroupElement::Grigorchuk(g) => self.bytes(g.word()),
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn corrupt(what: &str) -> Error {
    Error::Cache(format!("corrupt ball file: {what}"))
}

impl Reader<'_> {
    fn uint(&mut self) -> Result<u64> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let byte = *self.buf.get(self.pos).ok_or_else(|| corrupt("truncated"))?;
            self.pos += 1;
            v |= u64::from(byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(corrupt("varint overflow"))
    }

    fn len(&mut self) -> Result<usize> {
        // Every counted item takes at least one byte.
        let n = self.uint()? as usize;
        if n > self.buf.len() - self.pos {
            return Err(corrupt("length out of range"));
        }
        Ok(n)
    }

    fn int(&mut self) -> Result<i64> {
        let u = self.uint()?;
        Ok((u >> 1) as i64 ^ -((u & 1) as i64))
    }

    fn bytes(&mut self) -> Result<&[u8]> {
        let n = self.len()?;
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| corrupt("truncated"))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn bigint(&mut self) -> Result<BigInt> {
        Ok(BigInt::from_signed_bytes_le(self.bytes()?))
    }

    fn element(&mut self, family: &GroupFamily) -> Result<GroupElement> {
        Ok(match family {
            GroupFamily::Zd { d } => GroupElement::Zd((0..*d).map(|_| self.int()).collect::<Result<_>>()?),
            GroupFamily::Free { .. } => GroupElement::Free(self.bytes()?.to_vec()),
            GroupFamily::Heisenberg => GroupElement::Heisenberg([self.int()?, self.int()?, self.int()?]),
            GroupFamily::Lamplighter => {
                let n = self.len()?;
                let lamps = (0..n).map(|_| self.int()).collect::<Result<_>>()?;
                GroupElement::Lamplighter { lamps, pos: self.int()? }
            }
            GroupFamily::BaumslagSolitar { m } => {
                let exp = self.int()?;
                let den_exp = u32::try_from(self.uint()?).map_err(|_| corrupt("shift exponent"))?;
                bs_element(*m, exp, self.bigint()?, den_exp)
            }
            GroupFamily::Grigorchuk => GroupElement::Grigorchuk(GrigElement::from_letters(self.bytes()?)),
        })
    }
}

/// Serializes a ball with its trailing checksum.
pub fn encode(ball: &DirectedBall) -> Vec<u8> {
    let mut w = Writer::default();
    w.buf.extend_from_slice(MAGIC);
    w.bytes(ball.steps().family().to_string().as_bytes());
    w.uint(ball.radius() as u64);
    w.uint(ball.steps().len() as u64);
    for s in ball.steps().steps() {
        w.uint(s.name as u64);
        w.element(&s.element);
        w.bigint(s.prob.numer());
        w.bigint(s.prob.denom());
    }
    w.element(ball.center());
    w.uint(ball.interior_len() as u64);
    for (i, v) in ball.vertices().iter().enumerate() {
        w.element(v);
        w.uint(ball.distance(i) as u64);
    }
    w.uint(ball.boundary_len() as u64);
    for x in ball.boundary() {
        w.element(x);
    }
    for i in 0..ball.interior_len() {
        for e in ball.edges(i) {
            w.uint(match e.target {
                Target::Interior(v) => 2 * v as u64,
                Target::Boundary(x) => 2 * x as u64 + 1,
            });
        }
    }
    let digest = Sha256::digest(&w.buf);
    w.buf.extend_from_slice(&digest);
    w.buf
}

/// Parses and validates a ball written by [`encode`].
pub fn decode(bytes: &[u8]) -> Result<DirectedBall> {
    if bytes.len() < MAGIC.len() + DIGEST_LEN || &bytes[..MAGIC.len()] != MAGIC {
        return Err(corrupt("bad header"));
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(body).as_slice() != digest {
        return Err(corrupt("checksum mismatch"));
    }
    let mut r = Reader { buf: body, pos: MAGIC.len() };
    let family: GroupFamily = std::str::from_utf8(r.bytes()?).map_err(|_| corrupt("family"))?.parse()?;
    let group = Group::new(family.clone())?;
    let radius = r.uint()? as usize;
    let k = r.len()?;
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        let name = char::from_u32(r.uint()? as u32).ok_or_else(|| corrupt("step name"))?;
        let element = r.element(&family)?;
        let (num, den) = (r.bigint()?, r.bigint()?);
        if den == BigInt::from(0) {
            return Err(corrupt("zero denominator"));
        }
        steps.push(Step { name, element, prob: BigRational::new(num, den) });
    }
    let steps = StepDistribution::new(&group, steps)?;
    let center = r.element(&family)?;
    let n = r.len()?;
    let mut vertices = Vec::with_capacity(n);
    let mut distance = Vec::with_capacity(n);
    for _ in 0..n {
        vertices.push(r.element(&family)?);
        distance.push(r.uint()? as usize);
    }
    let m = r.len()?;
    let boundary = (0..m).map(|_| r.element(&family)).collect::<Result<Vec<_>>>()?;
    let mut adjacency = Vec::with_capacity(n);
    for _ in 0..n {
        let mut edges = Vec::with_capacity(k);
        for step in 0..k {
            let t = r.uint()? as usize;
            let target = if t % 2 == 0 { Target::Interior(t / 2) } else { Target::Boundary(t / 2) };
            edges.push(Edge { target, step });
        }
        adjacency.push(edges);
    }
    if r.pos != body.len() {
        return Err(corrupt("trailing bytes"));
    }
    DirectedBall::from_parts(center, radius, steps, vertices, distance, adjacency, boundary)
}

/// A directory of cached balls.
#[derive(Clone, Debug)]
pub struct BallCache {
    dir: PathBuf,
}

impl BallCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// The cache named by [`CACHE_DIR_VAR`], if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_DIR_VAR).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Content address of `B(center, radius)` under `steps`.
    pub fn key(center: &GroupElement, steps: &StepDistribution, radius: usize) -> String {
        let mut w = Writer::default();
        w.bytes(steps.fingerprint().as_bytes());
        w.element(center);
        w.uint(radius as u64);
        hex::encode(Sha256::digest(&w.buf))
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.ball"))
    }

    /// Loads a cached ball; a corrupt or mismatched file is removed and
    /// reported as a miss.
    pub fn load(&self, center: &GroupElement, steps: &StepDistribution, radius: usize) -> Result<Option<DirectedBall>> {
        let path = self.path(&Self::key(center, steps, radius));
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        match decode(&bytes) {
            Ok(b) if b.center() == center && b.radius() == radius && b.steps() == steps => Ok(Some(b)),
            _ => {
                fs::remove_file(&path)?;
                Ok(None)
            }
        }
    }

    /// Writes a ball atomically and returns its path.
    pub fn store(&self, ball: &DirectedBall) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(&Self::key(ball.center(), ball.steps(), ball.radius()));
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&encode(ball))?;
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(path)
    }

    pub fn get_or_build(&self, center: &GroupElement, steps: &StepDistribution, radius: usize) -> Result<DirectedBall> {
        if let Some(b) = self.load(center, steps, radius)? {
            return Ok(b);
        }
        let b = DirectedBall::build(center, steps, radius)?;
        self.store(&b)?;
        Ok(b)
    }
}

/// Builds a ball through the cache when one is given.
pub fn build_ball(
    cache: Option<&BallCache>,
    center: &GroupElement,
    steps: &StepDistribution,
    radius: usize,
) -> Result<DirectedBall> {
    match cache {
        Some(c) => c.get_or_build(center, steps, radius),
        None => DirectedBall::build(center, steps, radius),
    }
}
