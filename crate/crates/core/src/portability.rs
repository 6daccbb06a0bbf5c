//! Layout-polymorphic views and the parallel-for / parallel-reduce backends.
//!
//! A [`View2D`] is a dense `rows x cols` block of `f64` whose element order
//! is chosen at construction ([`Layout::RowMajor`] or [`Layout::ColMajor`]).
//! Kernels are executed through a [`Backend`], which is either plain
//! sequential iteration or a fixed set of worker chunks on a thread pool.

use std::fmt;
use std::marker::PhantomData;
use std::sync::{Arc, Condvar, Mutex};

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::{Error, Result};

/// Memory order of a [`View2D`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    /// Consecutive `j` are contiguous (particle-major / AoS-like).
    #[default]
    RowMajor,
    /// Consecutive `i` are contiguous (field-major / SoA-like).
    ColMajor,
}

impl Layout {
    #[inline]
    pub fn offset(self, rows: usize, cols: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < rows && j < cols, "index ({i}, {j}) outside {rows}x{cols}");
        match self {
            Layout::RowMajor => i * cols + j,
            Layout::ColMajor => j * rows + i,
        }
    }

    /// Inverse of [`Layout::offset`].
    #[inline]
    pub fn coords(self, rows: usize, cols: usize, offset: usize) -> (usize, usize) {
        debug_assert!(offset < rows * cols);
        match self {
            Layout::RowMajor => (offset / cols, offset % cols),
            Layout::ColMajor => (offset % rows, offset / rows),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layout::RowMajor => f.write_str("row"),
            Layout::ColMajor => f.write_str("col"),
        }
    }
}

/// Dense 2-D array of `f64` with a fixed shape and a runtime layout.
#[derive(Debug, Clone, PartialEq)]
pub struct View2D {
    rows: usize,
    cols: usize,
    layout: Layout,
    data: Vec<f64>,
}

impl View2D {
    pub fn zeros(rows: usize, cols: usize, layout: Layout) -> Self {
        Self::filled(rows, cols, layout, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, layout: Layout, value: f64) -> Self {
        Self {
            rows,
            cols,
            layout,
            data: vec![value; rows * cols],
        }
    }

    /// Wraps an existing buffer that is already in `layout` order.
    pub fn from_vec(rows: usize, cols: usize, layout: Layout, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Config(format!(
                "buffer of length {} cannot back a {rows}x{cols} view",
                data.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            layout,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        self.layout.offset(self.rows, self.cols, i, j)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index(i, j);
        self.data[k] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Copies the view into a new buffer with a different layout.
    pub fn to_layout(&self, layout: Layout) -> View2D {
        let mut out = View2D::zeros(self.rows, self.cols, layout);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Copies rows `start..end` into a new view with the same layout.
    pub fn slice_rows(&self, start: usize, end: usize) -> View2D {
        assert!(start <= end && end <= self.rows);
        let mut out = View2D::zeros(end - start, self.cols, self.layout);
        for i in start..end {
            for j in 0..self.cols {
                out.set(i - start, j, self.get(i, j));
            }
        }
        out
    }
}

/// Mutable access to exactly one row of a [`View2D`], handed to a row kernel.
///
/// Rows are disjoint sets of buffer offsets under either layout, so each
/// invocation of a row kernel owns its elements exclusively.
pub struct RowMut<'a> {
    ptr: *mut f64,
    row: usize,
    rows: usize,
    cols: usize,
    layout: Layout,
    _marker: PhantomData<&'a mut f64>,
}

impl RowMut<'_> {
    pub fn row(&self) -> usize {
        self.row
    }

    pub fn len(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.cols == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> f64 {
        assert!(j < self.cols, "column {j} out of range");
        let k = self.layout.offset(self.rows, self.cols, self.row, j);
        // SAFETY: k addresses row `self.row`, which this handle owns exclusively.
        unsafe { *self.ptr.add(k) }
    }

    #[inline]
    pub fn set(&mut self, j: usize, value: f64) {
        assert!(j < self.cols, "column {j} out of range");
        let k = self.layout.offset(self.rows, self.cols, self.row, j);
        // SAFETY: as in `get`.
        unsafe { *self.ptr.add(k) = value }
    }
}

#[derive(Clone, Copy)]
struct SendPtr(*mut f64);
// SAFETY: only used to hand out row-disjoint `RowMut` handles.
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

/// Kind of execution backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Sequential,
    DataParallel { workers: usize },
}

#[derive(Default)]
struct InFlight {
    count: Mutex<usize>,
    idle: Condvar,
}

impl InFlight {
    fn begin(&self) {
        *self.count.lock().unwrap() += 1;
    }

    fn end(&self) {
        let mut count = self.count.lock().unwrap();
        *count -= 1;
        if *count == 0 {
            self.idle.notify_all();
        }
    }

    fn wait_idle(&self) {
        let mut count = self.count.lock().unwrap();
        while *count > 0 {
            count = self.idle.wait(count).unwrap();
        }
    }
}

struct InFlightGuard<'a>(&'a InFlight);

impl Drop for InFlightGuard<'_> {
    fn drop(&mut self) {
        self.0.end();
    }
}

/// Execution strategy for kernels over an index range.
///
/// `Sequential` iterates indices in ascending order and is the reference
/// semantics. `DataParallel` splits `[0, n)` into `workers` contiguous chunks
/// of `ceil(n / workers)` indices, each run as one task on a shared pool.
/// Cloning a backend shares its pool and its in-flight bookkeeping.
#[derive(Clone)]
pub struct Backend {
    kind: BackendKind,
    pool: Option<Arc<ThreadPool>>,
    in_flight: Arc<InFlight>,
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Backend").field("kind", &self.kind).finish()
    }
}

impl Default for Backend {
    fn default() -> Self {
        Self::sequential()
    }
}

impl Backend {
    pub fn sequential() -> Self {
        Self {
            kind: BackendKind::Sequential,
            pool: None,
            in_flight: Arc::default(),
        }
    }

    pub fn data_parallel(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("perfport-worker-{i}"))
            .build()
            .map_err(|e| Error::Config(format!("failed to build thread pool: {e}")))?;
        Ok(Self {
            kind: BackendKind::DataParallel { workers },
            pool: Some(Arc::new(pool)),
            in_flight: Arc::default(),
        })
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            BackendKind::Sequential => "sequential",
            BackendKind::DataParallel { .. } => "parallel",
        }
    }

    /// Contiguous index chunks used by the data-parallel backend.
    pub fn chunks(&self, n: usize) -> Vec<std::ops::Range<usize>> {
        match self.kind {
            BackendKind::Sequential => {
                if n == 0 {
                    Vec::new()
                } else {
                    std::iter::once(0..n).collect()
                }
            }
            BackendKind::DataParallel { workers } => {
                let size = n.div_ceil(workers).max(1);
                (0..workers)
                    .map(|w| (w * size).min(n)..((w + 1) * size).min(n))
                    .filter(|r| !r.is_empty())
                    .collect()
            }
        }
    }

    /// Runs `kernel(i)` exactly once for every `i` in `0..n`.
    pub fn parallel_for<F>(&self, n: usize, kernel: F)
    where
        F: Fn(usize) + Sync,
    {
        match &self.pool {
            None => (0..n).for_each(kernel),
            Some(pool) => {
                self.in_flight.begin();
                let _guard = InFlightGuard(&self.in_flight);
                let chunks = self.chunks(n);
                let kernel = &kernel;
                pool.scope(|s| {
                    for range in chunks {
                        s.spawn(move |_| range.for_each(kernel));
                    }
                });
            }
        }
    }

    /// Runs `kernel(i, &mut out[i])` for every element of `out`.
    pub fn parallel_for_each<T, F>(&self, out: &mut [T], kernel: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync,
    {
        match &self.pool {
            None => out.iter_mut().enumerate().for_each(|(i, x)| kernel(i, x)),
            Some(pool) => {
                self.in_flight.begin();
                let _guard = InFlightGuard(&self.in_flight);
                let chunks = self.chunks(out.len());
                let kernel = &kernel;
                pool.scope(|s| {
                    let mut rest = out;
                    for range in chunks {
                        let (head, tail) = rest.split_at_mut(range.len());
                        rest = tail;
                        s.spawn(move |_| {
                            for (k, x) in head.iter_mut().enumerate() {
                                kernel(range.start + k, x);
                            }
                        });
                    }
                });
            }
        }
    }

    /// Runs `kernel` once per row of `view`, each invocation owning its row.
    pub fn parallel_rows<F>(&self, view: &mut View2D, kernel: F)
    where
        F: Fn(&mut RowMut<'_>) + Sync,
    {
        let (rows, cols, layout) = (view.rows, view.cols, view.layout);
        let ptr = SendPtr(view.data.as_mut_ptr());
        self.parallel_for(rows, move |i| {
            let ptr = ptr;
            let mut row = RowMut {
                ptr: ptr.0,
                row: i,
                rows,
                cols,
                layout,
                _marker: PhantomData,
            };
            kernel(&mut row);
        });
    }

    /// Combines `map(i)` over `0..n` starting from `identity`.
    ///
    /// Sequential folds in ascending index order. Data-parallel folds each
    /// chunk in ascending order, then folds chunk partials in chunk order.
    pub fn parallel_reduce<M, C>(&self, n: usize, identity: f64, map: M, combine: C) -> f64
    where
        M: Fn(usize) -> f64 + Sync,
        C: Fn(f64, f64) -> f64 + Sync,
    {
        match &self.pool {
            None => (0..n).fold(identity, |acc, i| combine(acc, map(i))),
            Some(pool) => {
                self.in_flight.begin();
                let _guard = InFlightGuard(&self.in_flight);
                let chunks = self.chunks(n);
                let mut partials = vec![identity; chunks.len()];
                let (map, combine) = (&map, &combine);
                pool.scope(|s| {
                    for (range, slot) in chunks.into_iter().zip(partials.iter_mut()) {
                        s.spawn(move |_| {
                            *slot = range.fold(identity, |acc, i| combine(acc, map(i)));
                        });
                    }
                });
                partials.into_iter().fold(identity, &combine)
            }
        }
    }

    pub fn parallel_sum<M>(&self, n: usize, map: M) -> f64
    where
        M: Fn(usize) -> f64 + Sync,
    {
        self.parallel_reduce(n, 0.0, map, |a, b| a + b)
    }

    pub fn parallel_max<M>(&self, n: usize, map: M) -> f64
    where
        M: Fn(usize) -> f64 + Sync,
    {
        self.parallel_reduce(n, f64::NEG_INFINITY, map, f64::max)
    }

    /// Blocks until every kernel submitted through this backend (or a clone
    /// of it) has completed.
    pub fn synchronize(&self) {
        if self.pool.is_some() {
            self.in_flight.wait_idle();
        }
    }
}
