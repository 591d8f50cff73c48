//! Line diffs and the pre→post line mapping derived from them.
//!
//! [`compute_diff`] produces an LCS-optimal edit script using Myers'
//! O(ND) algorithm. Inputs with more than [`LINEAR_SPACE_THRESHOLD`] lines go
//! through the divide-and-conquer "middle snake" variant, which needs only
//! O(N + M) memory and returns a script of the same (optimal) cost.
//!
//! Lines compare byte-for-byte; callers are expected to have stripped the
//! line terminator already (see [`crate::ingest::SourceTree`]).

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;

/// Above this many lines on either side the linear-space variant is used.
pub const LINEAR_SPACE_THRESHOLD: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HunkKind {
    Equal,
    Replace,
    Insert,
    Delete,
}

impl HunkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HunkKind::Equal => "EQUAL",
            HunkKind::Replace => "REPLACE",
            HunkKind::Insert => "INSERT",
            HunkKind::Delete => "DELETE",
        }
    }
}

/// A run of lines, 1-based. An empty span sits *before* line `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineSpan {
    pub start: u32,
    pub len: u32,
}

impl LineSpan {
    pub fn new(start: u32, len: u32) -> Self {
        LineSpan { start, len }
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Last line of the span; for an empty span this is `start - 1`.
    pub fn end(&self) -> u32 {
        self.start + self.len - 1
    }

    pub fn lines(&self) -> RangeInclusive<u32> {
        self.start..=self.end()
    }
}

impl fmt::Display for LineSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[]@{}", self.start)
        } else {
            write!(f, "[{},{}]", self.start, self.end())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hunk {
    pub kind: HunkKind,
    pub pre: LineSpan,
    pub post: LineSpan,
}

/// Ordered hunks covering both files completely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditScript {
    hunks: Vec<Hunk>,
    pre_len: u32,
    post_len: u32,
}

impl EditScript {
    pub fn hunks(&self) -> &[Hunk] {
        &self.hunks
    }

    pub fn pre_len(&self) -> u32 {
        self.pre_len
    }

    pub fn post_len(&self) -> u32 {
        self.post_len
    }

    /// Total number of lines in EQUAL hunks (the LCS length).
    pub fn equal_len(&self) -> u32 {
        self.hunks
            .iter()
            .filter(|h| h.kind == HunkKind::Equal)
            .map(|h| h.pre.len)
            .sum()
    }

    /// Rebuilds the post file: EQUAL hunks draw from `pre`, everything else
    /// from `post`.
    pub fn apply<S: AsRef<str>>(&self, pre: &[S], post: &[S]) -> Vec<String> {
        let mut out = Vec::with_capacity(self.post_len as usize);
        for h in &self.hunks {
            match h.kind {
                HunkKind::Equal => out.extend(
                    h.pre
                        .lines()
                        .map(|l| pre[l as usize - 1].as_ref().to_string()),
                ),
                HunkKind::Replace | HunkKind::Insert => out.extend(
                    h.post
                        .lines()
                        .map(|l| post[l as usize - 1].as_ref().to_string()),
                ),
                HunkKind::Delete => {}
            }
        }
        out
    }

    /// Unified-diff-like rendering: one `@@` header per hunk followed by the
    /// lines it covers (` ` kept, `-` removed, `+` added).
    pub fn render<S: AsRef<str>>(&self, pre: &[S], post: &[S]) -> String {
        let mut out = String::new();
        for h in &self.hunks {
            let _ = writeln!(
                out,
                "@@ -{},{} +{},{} @@ {}",
                h.pre.start,
                h.pre.len,
                h.post.start,
                h.post.len,
                h.kind.as_str()
            );
            match h.kind {
                HunkKind::Equal => {
                    for l in h.pre.lines() {
                        let _ = writeln!(out, " {}", pre[l as usize - 1].as_ref());
                    }
                }
                _ => {
                    for l in h.pre.lines() {
                        let _ = writeln!(out, "-{}", pre[l as usize - 1].as_ref());
                    }
                    for l in h.post.lines() {
                        let _ = writeln!(out, "+{}", post[l as usize - 1].as_ref());
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for EditScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.hunks {
            writeln!(f, "{:<7} {} -> {}", h.kind.as_str(), h.pre, h.post)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Equal,
    Delete,
    Insert,
}

/// Computes an LCS-optimal line diff.
pub fn compute_diff<S: AsRef<str>>(pre: &[S], post: &[S]) -> EditScript {
    compute_diff_with_threshold(pre, post, LINEAR_SPACE_THRESHOLD)
}

pub(crate) fn compute_diff_with_threshold<S: AsRef<str>>(
    pre: &[S],
    post: &[S],
    linear_threshold: usize,
) -> EditScript {
    let (a, b) = intern(pre, post);
    let mut ops = Vec::with_capacity(a.len() + b.len());
    if a.len().max(b.len()) > linear_threshold {
        let mut vf = V::new(a.len() + b.len());
        let mut vb = V::new(a.len() + b.len());
        conquer(&a, &b, &mut vf, &mut vb, &mut ops);
    } else {
        let prefix = common_prefix(&a, &b);
        let suffix = common_suffix(&a[prefix..], &b[prefix..]);
        ops.extend(std::iter::repeat_n(Op::Equal, prefix));
        myers_trace(
            &a[prefix..a.len() - suffix],
            &b[prefix..b.len() - suffix],
            &mut ops,
        );
        ops.extend(std::iter::repeat_n(Op::Equal, suffix));
    }
    group(&ops, a.len() as u32, b.len() as u32)
}

fn intern<'a, S: AsRef<str>>(pre: &'a [S], post: &'a [S]) -> (Vec<u32>, Vec<u32>) {
    let mut table: HashMap<&'a str, u32> = HashMap::new();
    let mut id = |s: &'a S| {
        let next = table.len() as u32;
        *table.entry(s.as_ref()).or_insert(next)
    };
    let a = pre.iter().map(&mut id).collect();
    let b = post.iter().map(&mut id).collect();
    (a, b)
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn common_suffix(a: &[u32], b: &[u32]) -> usize {
    a.iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count()
}

/// Forward Myers search keeping every frontier for the backtrack.
fn myers_trace(a: &[u32], b: &[u32], ops: &mut Vec<Op>) {
    let n = a.len() as isize;
    let m = b.len() as isize;
    if n == 0 {
        ops.extend(std::iter::repeat_n(Op::Insert, m as usize));
        return;
    }
    if m == 0 {
        ops.extend(std::iter::repeat_n(Op::Delete, n as usize));
        return;
    }
    let max = (n + m) as usize;
    let offset = max as isize + 1;
    let mut v = vec![0isize; 2 * max + 3];
    // trace[d] holds v[offset-d ..= offset+d] after round d
    let mut trace: Vec<Vec<isize>> = Vec::new();
    let mut found = None;
    'outer: for d in 0..=max as isize {
        for k in (-d..=d).step_by(2) {
            let idx = (offset + k) as usize;
            let mut x = if k == -d || (k != d && v[idx - 1] < v[idx + 1]) {
                v[idx + 1]
            } else {
                v[idx - 1] + 1
            };
            let mut y = x - k;
            while x < n && y < m && a[x as usize] == b[y as usize] {
                x += 1;
                y += 1;
            }
            v[idx] = x;
            if x >= n && y >= m {
                trace.push(v[(offset - d) as usize..=(offset + d) as usize].to_vec());
                found = Some(d);
                break 'outer;
            }
        }
        trace.push(v[(offset - d) as usize..=(offset + d) as usize].to_vec());
    }
    let d_final = found.expect("Myers search always reaches the end");

    let mut rev = Vec::with_capacity((n + m) as usize);
    let (mut x, mut y) = (n, m);
    for d in (1..=d_final).rev() {
        let prev = &trace[d as usize - 1];
        let get = |k: isize| prev[(k + d - 1) as usize];
        let k = x - y;
        let prev_k = if k == -d || (k != d && get(k - 1) < get(k + 1)) {
            k + 1
        } else {
            k - 1
        };
        let prev_x = get(prev_k);
        let prev_y = prev_x - prev_k;
        while x > prev_x && y > prev_y {
            rev.push(Op::Equal);
            x -= 1;
            y -= 1;
        }
        if prev_k == k + 1 {
            rev.push(Op::Insert);
        } else {
            rev.push(Op::Delete);
        }
        x = prev_x;
        y = prev_y;
    }
    while x > 0 && y > 0 {
        rev.push(Op::Equal);
        x -= 1;
        y -= 1;
    }
    debug_assert!(x == 0 && y == 0);
    ops.extend(rev.into_iter().rev());
}

/// Frontier vector indexable by negative diagonals.
struct V {
    offset: isize,
    v: Vec<usize>,
}

impl V {
    fn new(max_d: usize) -> Self {
        let d = max_d as isize + 2;
        V {
            offset: d,
            v: vec![0; 2 * d as usize + 1],
        }
    }
}

impl std::ops::Index<isize> for V {
    type Output = usize;
    fn index(&self, k: isize) -> &usize {
        &self.v[(k + self.offset) as usize]
    }
}

impl std::ops::IndexMut<isize> for V {
    fn index_mut(&mut self, k: isize) -> &mut usize {
        &mut self.v[(k + self.offset) as usize]
    }
}

/// Returns a point on an optimal path through the edit graph of `a`/`b`.
fn middle_snake(a: &[u32], b: &[u32], vf: &mut V, vb: &mut V) -> (usize, usize) {
    let n = a.len();
    let m = b.len();
    let delta = n as isize - m as isize;
    let odd = delta & 1 == 1;
    vf[1] = 0;
    vb[1] = 0;
    let d_max = ((n + m).div_ceil(2) + 1) as isize;
    for d in 0..d_max {
        for k in (-d..=d).rev().step_by(2) {
            let mut x = if k == -d || (k != d && vf[k - 1] < vf[k + 1]) {
                vf[k + 1]
            } else {
                vf[k - 1] + 1
            };
            let y = (x as isize - k) as usize;
            let (x0, y0) = (x, y);
            if x < n && y < m {
                x += common_prefix(&a[x..], &b[y..]);
            }
            vf[k] = x;
            if odd && (k - delta).abs() < d && vf[k] + vb[-(k - delta)] >= n {
                return (x0, y0);
            }
        }
        for k in (-d..=d).rev().step_by(2) {
            let mut x = if k == -d || (k != d && vb[k - 1] < vb[k + 1]) {
                vb[k + 1]
            } else {
                vb[k - 1] + 1
            };
            let mut y = (x as isize - k) as usize;
            if x < n && y < m {
                let adv = common_suffix(&a[..n - x], &b[..m - y]);
                x += adv;
                y += adv;
            }
            vb[k] = x;
            if !odd && (k - delta).abs() <= d && vb[k] + vf[-(k - delta)] >= n {
                return (n - x, m - y);
            }
        }
    }
    unreachable!("middle snake always found within ceil((N+M)/2) rounds")
}

fn conquer(a: &[u32], b: &[u32], vf: &mut V, vb: &mut V, ops: &mut Vec<Op>) {
    let prefix = common_prefix(a, b);
    let suffix = common_suffix(&a[prefix..], &b[prefix..]);
    let a_mid = &a[prefix..a.len() - suffix];
    let b_mid = &b[prefix..b.len() - suffix];
    ops.extend(std::iter::repeat_n(Op::Equal, prefix));
    if a_mid.is_empty() {
        ops.extend(std::iter::repeat_n(Op::Insert, b_mid.len()));
    } else if b_mid.is_empty() {
        ops.extend(std::iter::repeat_n(Op::Delete, a_mid.len()));
    } else {
        let (x, y) = middle_snake(a_mid, b_mid, vf, vb);
        if (x == 0 && y == 0) || (x == a_mid.len() && y == b_mid.len()) {
            // no progress possible through a split; solve directly
            myers_trace(a_mid, b_mid, ops);
        } else {
            conquer(&a_mid[..x], &b_mid[..y], vf, vb, ops);
            conquer(&a_mid[x..], &b_mid[y..], vf, vb, ops);
        }
    }
    ops.extend(std::iter::repeat_n(Op::Equal, suffix));
}

fn group(ops: &[Op], pre_len: u32, post_len: u32) -> EditScript {
    let mut hunks = Vec::new();
    let (mut x, mut y) = (1u32, 1u32);
    let mut i = 0;
    while i < ops.len() {
        if ops[i] == Op::Equal {
            let start = i;
            while i < ops.len() && ops[i] == Op::Equal {
                i += 1;
            }
            let len = (i - start) as u32;
            hunks.push(Hunk {
                kind: HunkKind::Equal,
                pre: LineSpan::new(x, len),
                post: LineSpan::new(y, len),
            });
            x += len;
            y += len;
        } else {
            let (mut dels, mut ins) = (0u32, 0u32);
            while i < ops.len() && ops[i] != Op::Equal {
                match ops[i] {
                    Op::Delete => dels += 1,
                    Op::Insert => ins += 1,
                    Op::Equal => unreachable!(),
                }
                i += 1;
            }
            let kind = match (dels, ins) {
                (0, _) => HunkKind::Insert,
                (_, 0) => HunkKind::Delete,
                _ => HunkKind::Replace,
            };
            hunks.push(Hunk {
                kind,
                pre: LineSpan::new(x, dels),
                post: LineSpan::new(y, ins),
            });
            x += dels;
            y += ins;
        }
    }
    debug_assert_eq!(x - 1, pre_len);
    debug_assert_eq!(y - 1, post_len);
    EditScript {
        hunks,
        pre_len,
        post_len,
    }
}

/// Where one pre-commit line ended up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineImage {
    Exact(u32),
    Interval(RangeInclusive<u32>),
    Absent,
}

/// Pre-commit line → post-commit image, for one file pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineMapping {
    images: Vec<LineImage>,
}

impl LineMapping {
    /// Image of a 1-based pre line. Lines past the end of the file are absent.
    pub fn image(&self, line: u32) -> &LineImage {
        if line == 0 {
            return &LineImage::Absent;
        }
        self.images
            .get(line as usize - 1)
            .unwrap_or(&LineImage::Absent)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Identity mapping over `len` lines.
    pub fn identity(len: u32) -> Self {
        LineMapping {
            images: (1..=len).map(LineImage::Exact).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &LineImage)> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, img)| (i as u32 + 1, img))
    }
}

pub fn build_line_mapping(script: &EditScript) -> LineMapping {
    let mut images = Vec::with_capacity(script.pre_len as usize);
    for h in &script.hunks {
        match h.kind {
            HunkKind::Equal => {
                images.extend((0..h.pre.len).map(|i| LineImage::Exact(h.post.start + i)))
            }
            HunkKind::Replace if !h.post.is_empty() => images
                .extend((0..h.pre.len).map(|_| LineImage::Interval(h.post.start..=h.post.end()))),
            HunkKind::Replace | HunkKind::Delete => {
                images.extend((0..h.pre.len).map(|_| LineImage::Absent))
            }
            HunkKind::Insert => {}
        }
    }
    LineMapping { images }
}

/// Smallest post interval covering the images of every mapped line in
/// `start..=end`, or `None` when all of them are absent.
pub fn map_range(mapping: &LineMapping, start: u32, end: u32) -> Option<RangeInclusive<u32>> {
    let mut lo = u32::MAX;
    let mut hi = 0;
    for line in start..=end {
        match mapping.image(line) {
            LineImage::Exact(p) => {
                lo = lo.min(*p);
                hi = hi.max(*p);
            }
            LineImage::Interval(r) => {
                lo = lo.min(*r.start());
                hi = hi.max(*r.end());
            }
            LineImage::Absent => {}
        }
    }
    (lo <= hi).then_some(lo..=hi)
}
