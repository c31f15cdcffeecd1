// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Transports for protocol frames.
//!
//! [`Router`] is an in-process, single-threaded, seeded scheduler. Every
//! frame submitted to it gets an ordinal; a [`FaultPlan`] keyed by ordinal
//! mutates frames as they are submitted. Links are FIFO per sender and
//! receiver, and the scheduler picks among non-empty links with a seeded
//! RNG, so one seed always gives one trace. When every link is empty the
//! router calls [`Node::on_idle`] on each node; this is the session deadline.
//!
//! [`tcp`] carries the same frames over sockets, sealed per link.

pub mod fault;
pub mod nodes;
pub mod tcp;

use std::any::Any;
use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::protocol::{Outgoing, PartyId};

pub use fault::{inject, FaultContext, FaultPlan, Mutation};
pub use nodes::{run_basic_session, BasicOutcome, BasicRun, ParticipantNode, ServerNode};

/// A protocol party attached to a router.
pub trait Node: Any {
    fn id(&self) -> PartyId;

    /// Handle raw frame bytes delivered from `from`.
    fn on_frame(&mut self, from: PartyId, bytes: &[u8]) -> Vec<Outgoing>;

    /// Called when no frames are in flight.
    fn on_idle(&mut self) -> Vec<Outgoing> {
        Vec::new()
    }

    fn as_any(&self) -> &dyn Any;
}

/// A frame in flight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub ordinal: usize,
    pub from: PartyId,
    pub to: PartyId,
    pub bytes: Vec<u8>,
}

/// What happened during [`Router::run`].
#[derive(Debug, Clone, Default)]
pub struct RouteReport {
    /// Frames as submitted, before faults.
    pub submitted: Vec<Envelope>,
    /// Frames in delivery order, after faults.
    pub delivered: Vec<Envelope>,
    /// Faults whose ordinal was never reached.
    pub unapplied: FaultPlan,
}

const DEFAULT_STEP_LIMIT: usize = 1_000_000;

pub struct Router {
    nodes: BTreeMap<PartyId, Box<dyn Node>>,
    links: BTreeMap<(PartyId, PartyId), VecDeque<Envelope>>,
    rng: ChaCha20Rng,
    faults: FaultPlan,
    context: Option<FaultContext>,
    next_ordinal: usize,
    step_limit: usize,
    report: RouteReport,
}

impl std::fmt::Debug for Router {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Router")
            .field("nodes", &self.nodes.keys().collect::<Vec<_>>())
            .field("in_flight", &self.links.values().map(VecDeque::len).sum::<usize>())
            .field("next_ordinal", &self.next_ordinal)
            .finish()
    }
}

impl Router {
    pub fn new(seed: u64) -> Self {
        Self {
            nodes: BTreeMap::new(),
            links: BTreeMap::new(),
            rng: ChaCha20Rng::seed_from_u64(seed),
            faults: FaultPlan::default(),
            context: None,
            next_ordinal: 0,
            step_limit: DEFAULT_STEP_LIMIT,
            report: RouteReport::default(),
        }
    }

    pub fn with_faults(mut self, plan: FaultPlan, context: FaultContext) -> Self {
        self.faults = plan;
        self.context = Some(context);
        self
    }

    pub fn with_step_limit(mut self, limit: usize) -> Self {
        self.step_limit = limit;
        self
    }

    pub fn add(&mut self, node: Box<dyn Node>) {
        self.nodes.insert(node.id(), node);
    }

    pub fn node(&self, id: PartyId) -> Option<&dyn Node> {
        self.nodes.get(&id).map(Box::as_ref)
    }

    /// Typed view of a node.
    pub fn node_as<T: Node>(&self, id: PartyId) -> Option<&T> {
        self.node(id)?.as_any().downcast_ref::<T>()
    }

    /// Queue a frame, applying any fault planned for its ordinal.
    pub fn submit(&mut self, from: PartyId, out: Outgoing) -> Result<()> {
        if !self.nodes.contains_key(&out.to) {
            return Err(Error::UnknownDestination(out.to.to_string()));
        }
        let env = Envelope {
            ordinal: self.next_ordinal,
            from,
            to: out.to,
            bytes: out.frame.encode(),
        };
        self.next_ordinal += 1;
        self.report.submitted.push(env.clone());
        let mutations = self.faults.take(env.ordinal);
        let mut copies = vec![env];
        let mut jump = false;
        for m in mutations {
            match m {
                Mutation::Reorder => jump = true,
                other => {
                    copies = fault::apply(&other, copies, self.context.as_ref(), &mut self.rng)?;
                }
            }
        }
        let link = self.links.entry((from, out.to)).or_default();
        for env in copies {
            if jump {
                link.push_front(env);
            } else {
                link.push_back(env);
            }
        }
        Ok(())
    }

    /// Deliver until every link is empty and no node has idle work.
    pub fn run(&mut self, initial: Vec<(PartyId, Outgoing)>) -> Result<RouteReport> {
        for (from, out) in initial {
            self.submit(from, out)?;
        }
        let mut steps = 0usize;
        loop {
            while let Some(env) = self.pop_next() {
                steps += 1;
                if steps > self.step_limit {
                    return Err(Error::InvalidState("router step limit exceeded"));
                }
                let to = env.to;
                let node = self
                    .nodes
                    .get_mut(&to)
                    .ok_or_else(|| Error::UnknownDestination(to.to_string()))?;
                let replies = node.on_frame(env.from, &env.bytes);
                self.report.delivered.push(env);
                for r in replies {
                    self.submit(to, r)?;
                }
            }
            let mut idle_work = Vec::new();
            for (id, node) in self.nodes.iter_mut() {
                idle_work.extend(node.on_idle().into_iter().map(|o| (*id, o)));
            }
            if idle_work.is_empty() {
                break;
            }
            for (from, out) in idle_work {
                self.submit(from, out)?;
            }
        }
        let mut report = std::mem::take(&mut self.report);
        report.unapplied = std::mem::take(&mut self.faults);
        Ok(report)
    }

    fn pop_next(&mut self) -> Option<Envelope> {
        let ready: Vec<(PartyId, PartyId)> =
            self.links.iter().filter(|(_, q)| !q.is_empty()).map(|(k, _)| *k).collect();
        if ready.is_empty() {
            return None;
        }
        let key = ready[self.rng.gen_range(0..ready.len())];
        self.links.get_mut(&key)?.pop_front()
    }
}
