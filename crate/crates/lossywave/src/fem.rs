//! 1-D finite-element discretization: uniform linear-element meshes, lumped
//! mass, and assembly of the mass-normalized stiffness operator.
//!
//! The discretization uses hat functions on a uniform mesh. With row-sum
//! (lumped) mass the mass matrix is diagonal — `h` at interior nodes, `h/2`
//! at free end nodes — so the symmetric normalization
//! `K = M^(-1/2) K_fem M^(-1/2)` is cheap and exact. After normalization the
//! semi-discrete wave equation reads `p̈ + c² K p = g(t)` with an identity
//! mass, which is the form every solver in this crate consumes.
//!
//! Dirichlet (fixed) boundary nodes are eliminated from the system; the
//! assembled operator acts on the remaining free degrees of freedom and
//! [`AssembledSystem`] keeps the node ↔ dof correspondence.

use nalgebra::DMatrix;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spd::{SpdMatrix, DEFAULT_DEFINITENESS_TOL};

/// End condition of the 1-D domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// Homogeneous Dirichlet: the end node is clamped to zero and removed
    /// from the unknowns.
    Fixed,
    /// Homogeneous Neumann: the end node is a regular unknown with half a
    /// lumped mass.
    Free,
}

/// Uniform 1-D mesh of linear elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    length: f64,
    n_elements: usize,
    boundary: (BoundaryKind, BoundaryKind),
}

impl Mesh {
    /// Build a uniform mesh over `[0, length]` with `n_elements` equal
    /// elements and the given (left, right) end conditions.
    pub fn uniform(
        length: f64,
        n_elements: usize,
        boundary: (BoundaryKind, BoundaryKind),
    ) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid_argument(format!(
                "mesh length must be finite and positive, got {length}"
            )));
        }
        if n_elements < 2 {
            return Err(Error::invalid_argument(format!(
                "mesh needs at least 2 elements, got {n_elements}"
            )));
        }
        Ok(Mesh {
            length,
            n_elements,
            boundary,
        })
    }

    /// Domain length.
    #[must_use]
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of elements.
    #[must_use]
    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    /// Number of nodes, including any fixed boundary nodes.
    #[must_use]
    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    /// Element length `h`.
    #[must_use]
    pub fn spacing(&self) -> f64 {
        self.length / self.n_elements as f64
    }

    /// Coordinate of a node (node indices run `0..=n_elements` left to
    /// right).
    #[must_use]
    pub fn coord(&self, node: usize) -> f64 {
        self.length * node as f64 / self.n_elements as f64
    }

    /// (left, right) end conditions.
    #[must_use]
    pub fn boundary(&self) -> (BoundaryKind, BoundaryKind) {
        self.boundary
    }

    /// Whether `node` is eliminated by a fixed boundary condition.
    #[must_use]
    pub fn node_is_fixed(&self, node: usize) -> bool {
        (node == 0 && self.boundary.0 == BoundaryKind::Fixed)
            || (node == self.n_elements && self.boundary.1 == BoundaryKind::Fixed)
    }
}

/// Assembled, mass-normalized system over the free degrees of freedom.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    mesh: Mesh,
    stiffness: SpdMatrix,
    free_nodes: Vec<usize>,
    node_to_dof: Vec<Option<usize>>,
    lumped_mass: Vec<f64>,
}

impl AssembledSystem {
    /// Assemble the mass-normalized stiffness `K = M^(-1/2) K_fem M^(-1/2)`
    /// with fixed boundary nodes eliminated.
    #[must_use]
    pub fn assemble(mesh: Mesh) -> Self {
        let h = mesh.spacing();
        let n_nodes = mesh.n_nodes();
        let last = n_nodes - 1;
        let (left, right) = mesh.boundary();

        let mut free_nodes = Vec::with_capacity(n_nodes);
        let mut node_to_dof = vec![None; n_nodes];
        for (node, slot) in node_to_dof.iter_mut().enumerate() {
            let clamped = (node == 0 && left == BoundaryKind::Fixed)
                || (node == last && right == BoundaryKind::Fixed);
            if !clamped {
                *slot = Some(free_nodes.len());
                free_nodes.push(node);
            }
        }

        // Lumped mass per free node: h interior, h/2 at a free end.
        let lumped_mass: Vec<f64> = free_nodes
            .iter()
            .map(|&node| if node == 0 || node == last { 0.5 * h } else { h })
            .collect();
        let inv_sqrt_mass: Vec<f64> = lumped_mass.iter().map(|&m| 1.0 / m.sqrt()).collect();

        // K_fem entries on free dofs: diagonal 2/h interior, 1/h at a free
        // end; off-diagonal -1/h between mesh neighbours.
        let n = free_nodes.len();
        let mut k = DMatrix::<f64>::zeros(n, n);
        for (dof, &node) in free_nodes.iter().enumerate() {
            let diag = if node == 0 || node == last { 1.0 / h } else { 2.0 / h };
            k[(dof, dof)] = diag * inv_sqrt_mass[dof] * inv_sqrt_mass[dof];
            if node < last {
                if let Some(right_dof) = node_to_dof[node + 1] {
                    let coupling = -(1.0 / h) * inv_sqrt_mass[dof] * inv_sqrt_mass[right_dof];
                    k[(dof, right_dof)] = coupling;
                    k[(right_dof, dof)] = coupling;
                }
            }
        }

        let stiffness = SpdMatrix::from_symmetric(k, DEFAULT_DEFINITENESS_TOL)
            .expect("assembled stiffness is symmetric by construction");

        AssembledSystem {
            mesh,
            stiffness,
            free_nodes,
            node_to_dof,
            lumped_mass,
        }
    }

    /// The mesh this system was assembled from.
    #[must_use]
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Mass-normalized stiffness over free dofs.
    #[must_use]
    pub fn stiffness(&self) -> &SpdMatrix {
        &self.stiffness
    }

    /// Number of free degrees of freedom.
    #[must_use]
    pub fn n_dofs(&self) -> usize {
        self.free_nodes.len()
    }

    /// Node index carried by each dof, ascending.
    #[must_use]
    pub fn free_nodes(&self) -> &[usize] {
        &self.free_nodes
    }

    /// The dof holding `node`, or `None` if the node is clamped.
    #[must_use]
    pub fn dof_of_node(&self, node: usize) -> Option<usize> {
        self.node_to_dof.get(node).copied().flatten()
    }

    /// Node index for a dof. Panics if `dof >= n_dofs()`.
    #[must_use]
    pub fn node_of_dof(&self, dof: usize) -> usize {
        self.free_nodes[dof]
    }

    /// Coordinate of the node a dof lives on.
    #[must_use]
    pub fn position_of_dof(&self, dof: usize) -> f64 {
        self.mesh.coord(self.free_nodes[dof])
    }

    /// Lumped mass associated with each free dof.
    #[must_use]
    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped_mass
    }

    /// Mass-normalized unit point load at `node`: `M^(-1/2) e_node`, i.e. a
    /// single entry `1/sqrt(m_node)` on the node's dof.
    pub fn point_source_vector(&self, node: usize) -> Result<DVector<f64>> {
        if node >= self.mesh.n_nodes() {
            return Err(Error::invalid_argument(format!(
                "source node {node} out of range (mesh has nodes 0..={})",
                self.mesh.n_nodes() - 1
            )));
        }
        let Some(dof) = self.dof_of_node(node) else {
            return Err(Error::invalid_argument(format!(
                "source node {node} sits on a fixed boundary and carries no dof"
            )));
        };
        let mut g = DVector::zeros(self.n_dofs());
        g[dof] = 1.0 / self.lumped_mass[dof].sqrt();
        Ok(g)
    }
}
