//! Row-block parallel engine.
//!
//! The matrix is tiled into contiguous row blocks, one per worker. Each
//! solve iteration has three phases: the coordinator broadcasts the iterate,
//! workers compute disjoint output segments with the same ascending-column
//! kernel as the sequential matvec, and the coordinator gathers segments in
//! block order. Values are therefore bit-identical to the sequential path
//! for every worker count, and all randomness stays on the coordinator.
//!
//! The substrate is a shared-memory worker pool; the broadcast/gather
//! contract matches a message-passing layout so a distributed backend could
//! be swapped in behind the same types.

use std::sync::mpsc;
use std::sync::Arc;
use std::thread::JoinHandle;

use crate::error::{Error, Result};
use crate::linalg::{row_dot, row_dot_counted, DenseMatrix, Vector};
use crate::solver::{solve_epmp, EigenEstimate, EpmpConfig, MatVecEngine};

/// One worker's contiguous rows of the matrix. `owner` is the 1-based
/// worker index.
#[derive(Debug, Clone, PartialEq)]
pub struct RowBlock {
    pub owner: usize,
    pub start_row: usize,
    pub row_count: usize,
    pub data: Vec<f64>,
}

/// Block descriptor without the data payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub owner: usize,
    pub start_row: usize,
    pub row_count: usize,
}

/// Partitioning of `n` rows over `p` workers: disjoint, ordered, covering,
/// with row counts differing by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelPlan {
    pub workers: usize,
    pub n: usize,
    pub blocks: Vec<BlockSpec>,
}

/// Per-iteration cost model: `2 n ceil(n/p)` multiply-adds on the widest
/// worker, one broadcast and one gather of `n` scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostEstimate {
    pub flops_per_worker_per_iter: u64,
    pub broadcast_volume_per_iter: u64,
    pub gather_volume_per_iter: u64,
}

/// Splits `n` rows across `p` workers: the first `n mod p` blocks take
/// `ceil(n/p)` rows, the rest `floor(n/p)`.
pub fn partition_rows(n: usize, p: usize) -> Result<ParallelPlan> {
    if p < 1 || p > n {
        return Err(Error::InvalidArgument(format!(
            "worker count must satisfy 1 <= p <= n, got p = {p} for n = {n}"
        )));
    }
    let base = n / p;
    let extra = n % p;
    let mut blocks = Vec::with_capacity(p);
    let mut start = 0;
    for i in 0..p {
        let rows = if i < extra { base + 1 } else { base };
        blocks.push(BlockSpec {
            owner: i + 1,
            start_row: start,
            row_count: rows,
        });
        start += rows;
    }
    debug_assert_eq!(start, n);
    Ok(ParallelPlan {
        workers: p,
        n,
        blocks,
    })
}

/// Copies each worker's rows out of the matrix, mirroring the layout where
/// every processor holds only its own part.
pub fn distribute_rows(a: &DenseMatrix, plan: &ParallelPlan) -> Result<Vec<RowBlock>> {
    if a.n() != plan.n {
        return Err(Error::DimensionMismatch {
            expected: plan.n,
            found: a.n(),
        });
    }
    let n = plan.n;
    let mut blocks = Vec::with_capacity(plan.blocks.len());
    for spec in &plan.blocks {
        let mut data = Vec::new();
        data.try_reserve_exact(spec.row_count * n)
            .map_err(|_| Error::OutOfMemory {
                requested: (spec.row_count * n) as u128 * std::mem::size_of::<f64>() as u128,
            })?;
        data.extend_from_slice(
            &a.values()[spec.start_row * n..(spec.start_row + spec.row_count) * n],
        );
        blocks.push(RowBlock {
            owner: spec.owner,
            start_row: spec.start_row,
            row_count: spec.row_count,
            data,
        });
    }
    Ok(blocks)
}

/// One worker's share of the matvec: its rows times the broadcast vector.
pub fn block_matvec(block: &RowBlock, v: &[f64]) -> Vector {
    let n = v.len();
    debug_assert_eq!(block.data.len(), block.row_count * n);
    (0..block.row_count)
        .map(|r| row_dot(&block.data[r * n..(r + 1) * n], v))
        .collect()
}

/// `block_matvec` with an exact multiply-add count, used to validate the
/// cost model against the kernel.
pub fn block_matvec_counted(block: &RowBlock, v: &[f64]) -> (Vector, u64) {
    let n = v.len();
    let mut flops = 0u64;
    let seg = (0..block.row_count)
        .map(|r| row_dot_counted(&block.data[r * n..(r + 1) * n], v, &mut flops))
        .collect();
    (seg, flops)
}

/// Broadcast/gather matvec over pre-distributed blocks. Spawns one scoped
/// thread per non-coordinator block; worker 1's block is computed inline by
/// the coordinator. The gather assembles segments in block order, so the
/// result is bit-identical to the sequential `matvec` for every `p`.
pub fn parallel_matvec(plan: &ParallelPlan, blocks: &[RowBlock], v: &[f64]) -> Result<Vector> {
    if v.len() != plan.n {
        return Err(Error::DimensionMismatch {
            expected: plan.n,
            found: v.len(),
        });
    }
    if blocks.len() != plan.blocks.len()
        || blocks
            .iter()
            .zip(&plan.blocks)
            .any(|(b, s)| {
                b.owner != s.owner
                    || b.start_row != s.start_row
                    || b.row_count != s.row_count
                    || b.data.len() != s.row_count * plan.n
            })
    {
        return Err(Error::InvalidArgument("blocks do not match the plan".into()));
    }

    if plan.workers == 1 {
        return Ok(block_matvec(&blocks[0], v));
    }

    let mut y = vec![0.0f64; plan.n];
    std::thread::scope(|scope| {
        let handles: Vec<_> = blocks[1..]
            .iter()
            .map(|block| scope.spawn(move || block_matvec(block, v)))
            .collect();
        let coord = block_matvec(&blocks[0], v);
        y[blocks[0].start_row..blocks[0].start_row + blocks[0].row_count]
            .copy_from_slice(&coord);
        for (block, handle) in blocks[1..].iter().zip(handles) {
            let seg = handle.join().expect("worker thread panicked");
            y[block.start_row..block.start_row + block.row_count].copy_from_slice(&seg);
        }
    });
    Ok(y)
}

enum Job {
    Matvec(Arc<Vector>),
}

/// Persistent worker pool for iterative solves. Worker 1 is the coordinator
/// and computes its own block inline; workers 2..p run on threads and
/// receive broadcast iterates over channels, answering with their owner
/// index and output segment.
pub struct WorkerPool {
    n: usize,
    plan: ParallelPlan,
    coordinator_block: RowBlock,
    job_txs: Vec<mpsc::Sender<Job>>,
    result_rx: mpsc::Receiver<(usize, Vector)>,
    handles: Vec<JoinHandle<()>>,
}

impl WorkerPool {
    pub fn new(a: &DenseMatrix, p: usize) -> Result<Self> {
        let plan = partition_rows(a.n(), p)?;
        let mut blocks = distribute_rows(a, &plan)?;
        let coordinator_block = blocks.remove(0);

        let (result_tx, result_rx) = mpsc::channel();
        let mut job_txs = Vec::with_capacity(blocks.len());
        let mut handles = Vec::with_capacity(blocks.len());
        for block in blocks {
            let (tx, rx) = mpsc::channel::<Job>();
            let out = result_tx.clone();
            handles.push(std::thread::spawn(move || {
                while let Ok(Job::Matvec(v)) = rx.recv() {
                    let seg = block_matvec(&block, &v);
                    if out.send((block.owner, seg)).is_err() {
                        break;
                    }
                }
            }));
            job_txs.push(tx);
        }
        Ok(Self {
            n: a.n(),
            plan,
            coordinator_block,
            job_txs,
            result_rx,
            handles,
        })
    }

    pub fn workers(&self) -> usize {
        self.plan.workers
    }

    pub fn plan(&self) -> &ParallelPlan {
        &self.plan
    }

    /// Broadcast `v`, compute the coordinator block inline, gather segments
    /// into block order.
    pub fn matvec(&self, v: &[f64]) -> Vector {
        debug_assert_eq!(v.len(), self.n);
        let shared = Arc::new(v.to_vec());
        for tx in &self.job_txs {
            tx.send(Job::Matvec(Arc::clone(&shared)))
                .expect("worker channel closed");
        }
        let mut y = vec![0.0f64; self.n];
        let cb = &self.coordinator_block;
        let seg = block_matvec(cb, v);
        y[cb.start_row..cb.start_row + cb.row_count].copy_from_slice(&seg);
        for _ in 0..self.job_txs.len() {
            let (owner, seg) = self.result_rx.recv().expect("worker disconnected");
            let spec = self.plan.blocks[owner - 1];
            y[spec.start_row..spec.start_row + spec.row_count].copy_from_slice(&seg);
        }
        y
    }
}

impl Drop for WorkerPool {
    fn drop(&mut self) {
        self.job_txs.clear();
        for handle in self.handles.drain(..) {
            let _ = handle.join();
        }
    }
}

impl MatVecEngine for WorkerPool {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, v: &[f64]) -> Vector {
        self.matvec(v)
    }
}

/// Parallel annealed solve: identical control flow to `epmp_sequential`,
/// with the matvec served by the worker pool. Bit-identical to the
/// sequential result for every `1 <= p <= n`.
pub fn epmp_parallel(a: &DenseMatrix, cfg: &EpmpConfig, p: usize) -> Result<EigenEstimate> {
    let pool = WorkerPool::new(a, p)?;
    solve_epmp(&pool, cfg)
}

/// Per-iteration cost estimate for dimension `n` over `p` workers.
pub fn cost_model(n: usize, p: usize) -> Result<CostEstimate> {
    if p < 1 || p > n {
        return Err(Error::InvalidArgument(format!(
            "worker count must satisfy 1 <= p <= n, got p = {p} for n = {n}"
        )));
    }
    let widest = n.div_ceil(p) as u64;
    Ok(CostEstimate {
        flops_per_worker_per_iter: 2 * n as u64 * widest,
        broadcast_volume_per_iter: n as u64,
        gather_volume_per_iter: n as u64,
    })
}
