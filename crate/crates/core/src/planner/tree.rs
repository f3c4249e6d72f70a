use crate::kinematics::{ControlSegment, ControlSequence};
use crate::physics::SystemState;

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct Node {
    pub state: SystemState,
    pub h: f64,
    pub parent: Option<NodeId>,
    /// Inward edge control; `None` only at the root.
    pub segment: Option<ControlSegment>,
    pub depth: usize,
    pub children: usize,
}

/// Rooted search tree with control-labelled edges. Nodes are only ever
/// appended, so ids are stable and the latest node is the last one.
#[derive(Debug, Clone)]
pub struct MotionTree {
    nodes: Vec<Node>,
    depth: usize,
}

impl MotionTree {
    pub fn new(root: SystemState, h: f64) -> Self {
        Self {
            nodes: vec![Node {
                state: root,
                h,
                parent: None,
                segment: None,
                depth: 0,
                children: 0,
            }],
            depth: 0,
        }
    }

    pub const ROOT: NodeId = 0;

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn latest(&self) -> NodeId {
        self.nodes.len() - 1
    }

    /// Depth of the deepest node.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn add(&mut self, parent: NodeId, state: SystemState, h: f64, segment: ControlSegment) -> NodeId {
        let depth = self.nodes[parent].depth + 1;
        self.nodes[parent].children += 1;
        self.depth = self.depth.max(depth);
        self.nodes.push(Node {
            state,
            h,
            parent: Some(parent),
            segment: Some(segment),
            depth,
            children: 0,
        });
        self.nodes.len() - 1
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].children == 0)
    }

    /// Node ids from the root to `id`, inclusive.
    pub fn path(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Edge controls along the root → `id` path, in execution order.
    pub fn extract_controls(&self, id: NodeId) -> ControlSequence {
        self.path(id)
            .into_iter()
            .filter_map(|n| self.nodes[n].segment.clone())
            .collect()
    }
}
