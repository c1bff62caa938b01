//! Homotopy and homology invariants of finite digraphs in exact arithmetic.

pub mod cayley;
pub mod covering;
pub mod digraph;
pub mod error;
pub mod exhaustion;
pub mod fundamental;
pub mod group;
pub mod linalg;
pub mod nerve;
pub mod path;

pub use cayley::{
    abelian_ph, ball_projection, cayley_ball, cayley_finite, check_theorem_abelian_hypotheses, f_l_presentation,
    group_homology_free_abelian, rho_kernel, w_l_relations, RelationWord,
};
pub use covering::{
    build_cover, deck_group, is_l_covering, lift_homotopy, lift_path, omega_rank_check, CoverMorphism, CoveringCheck,
    DeckGroup, FiberAction,
};
pub use digraph::{
    box_product, check_morphism, check_morphism_by_distance, is_homotopy, is_homotopy_maps, morphism_distance,
    parse_digraph, parse_digraph_with_warnings, Digraph, DigraphMorphism, Dist, DistanceMatrix, MorphismCheck,
    PointedDigraph,
};
pub use error::{Error, Result};
pub use exhaustion::{exhaustion_report, ExhaustionReport, Invariant};
pub use fundamental::{abelianization, pi_l_presentation, AbelianInvariants, GroupPresentation, PiPresentation};
pub use group::{FGAbelian, GenSet, Group, GroupTable};
pub use linalg::{ChainComplexZ, DegreeHomology, FieldKind, HomologySummary, Ring, SparseIntMatrix};
pub use nerve::{magnitude_homology, magnitude_table, mpss_page, MagnitudeTable, MpssPage};
pub use path::{omega_basis, ph, ph_induced, PathComplex};
