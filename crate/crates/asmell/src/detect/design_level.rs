//! Design-level classification of cycles: does a cycle live among files,
//! among components, or at both abstraction levels?

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{strongly_connected_components, DependencyGraph, Level};

use super::DesignLevel;

/// Classifies a cycle's member set by the abstraction levels it disturbs.
///
/// For a file-level cycle: [`DesignLevel::FileOnly`] when all members
/// share one component; otherwise [`DesignLevel::Both`] when the members'
/// components themselves form a cycle in the component graph restricted
/// to those components, and [`DesignLevel::FileOnly`] when they do not
/// (border-crossing files that never close a component cycle).
///
/// For a component-level cycle: [`DesignLevel::Both`] when some
/// file-level cycle of the same version spans at least two of its member
/// components, else [`DesignLevel::ComponentOnly`].
pub fn affected_design_level(
    members: &BTreeSet<String>,
    level: Level,
    file_graph: &DependencyGraph,
    component_graph: &DependencyGraph,
    file_cycles: &[BTreeSet<String>],
) -> DesignLevel {
    match level {
        Level::File => {
            let components: BTreeSet<&str> = members
                .iter()
                .filter_map(|path| {
                    file_graph
                        .index_of(path)
                        .and_then(|i| file_graph.node(i).component.as_deref())
                })
                .collect();
            if components.len() < 2 {
                return DesignLevel::FileOnly;
            }
            if induced_subgraph_has_cycle(component_graph, &components) {
                DesignLevel::Both
            } else {
                DesignLevel::FileOnly
            }
        }
        Level::Component => {
            let spanning = file_cycles.iter().any(|cycle| {
                let touched: BTreeSet<&str> = cycle
                    .iter()
                    .filter_map(|path| {
                        file_graph
                            .index_of(path)
                            .and_then(|i| file_graph.node(i).component.as_deref())
                    })
                    .filter(|c| members.contains(*c))
                    .collect();
                touched.len() >= 2
            });
            if spanning {
                DesignLevel::Both
            } else {
                DesignLevel::ComponentOnly
            }
        }
    }
}

/// Does the subgraph induced on `selected` node paths contain a cycle?
fn induced_subgraph_has_cycle(graph: &DependencyGraph, selected: &BTreeSet<&str>) -> bool {
    let indices: Vec<usize> =
        selected.iter().filter_map(|path| graph.index_of(path)).collect();
    let local: BTreeMap<usize, usize> =
        indices.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let adj: Vec<Vec<usize>> = indices
        .iter()
        .map(|&old| {
            graph
                .out_neighbors(old)
                .iter()
                .filter_map(|d| local.get(d).copied())
                .collect()
        })
        .collect();
    strongly_connected_components(&adj).iter().any(|scc| scc.len() >= 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeSpec;

    fn file_graph(nodes: &[(&str, &str)], edges: &[(&str, &str)]) -> DependencyGraph {
        DependencyGraph::build(
            Level::File,
            0,
            "test",
            nodes
                .iter()
                .map(|(p, c)| NodeSpec::new(*p, 5).with_component(*c))
                .collect(),
            edges.iter().map(|(s, d)| (s.to_string(), d.to_string())).collect(),
        )
        .unwrap()
    }

    fn members(paths: &[&str]) -> BTreeSet<String> {
        paths.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn file_cycle_inside_one_component_is_file_only() {
        let fg = file_graph(
            &[("C1/a1.c", "C1"), ("C1/a2.c", "C1")],
            &[("C1/a1.c", "C1/a2.c"), ("C1/a2.c", "C1/a1.c")],
        );
        let cg = fg.project_to_components().unwrap();
        let level = affected_design_level(
            &members(&["C1/a1.c", "C1/a2.c"]),
            Level::File,
            &fg,
            &cg,
            &[],
        );
        assert_eq!(level, DesignLevel::FileOnly);
    }

    #[test]
    fn file_cycle_across_components_is_both() {
        let fg = file_graph(
            &[("C1/a.c", "C1"), ("C2/b.c", "C2")],
            &[("C1/a.c", "C2/b.c"), ("C2/b.c", "C1/a.c")],
        );
        let cg = fg.project_to_components().unwrap();
        let level = affected_design_level(
            &members(&["C1/a.c", "C2/b.c"]),
            Level::File,
            &fg,
            &cg,
            &[],
        );
        assert_eq!(level, DesignLevel::Both);
    }

    #[test]
    fn spanning_files_without_component_cycle_stay_file_only() {
        // The true projection of a spanning file cycle always closes a
        // component cycle, but a caller-supplied component graph (e.g.
        // from declared interfaces) may omit the back edge.
        let fg = file_graph(
            &[("C1/a.c", "C1"), ("C2/b.c", "C2")],
            &[("C1/a.c", "C2/b.c"), ("C2/b.c", "C1/a.c")],
        );
        let cg = DependencyGraph::build(
            Level::Component,
            0,
            "test",
            vec![NodeSpec::new("C1", 5), NodeSpec::new("C2", 5)],
            vec![("C1".into(), "C2".into())],
        )
        .unwrap();
        let level = affected_design_level(
            &members(&["C1/a.c", "C2/b.c"]),
            Level::File,
            &fg,
            &cg,
            &[],
        );
        assert_eq!(level, DesignLevel::FileOnly);
    }

    #[test]
    fn component_cycle_with_spanning_file_cycle_is_both() {
        let fg = file_graph(
            &[("C1/a.c", "C1"), ("C2/b.c", "C2")],
            &[("C1/a.c", "C2/b.c"), ("C2/b.c", "C1/a.c")],
        );
        let cg = fg.project_to_components().unwrap();
        let file_cycles = vec![members(&["C1/a.c", "C2/b.c"])];
        let level = affected_design_level(
            &members(&["C1", "C2"]),
            Level::Component,
            &fg,
            &cg,
            &file_cycles,
        );
        assert_eq!(level, DesignLevel::Both);
    }

    #[test]
    fn component_cycle_without_spanning_file_cycle_is_component_only() {
        // C1 → C2 → C3 → C1 via three distinct border files; the file
        // graph itself is acyclic.
        let fg = file_graph(
            &[("C1/a.c", "C1"), ("C2/b.c", "C2"), ("C3/c.c", "C3")],
            &[("C1/a.c", "C2/b.c"), ("C2/b.c", "C3/c.c"), ("C3/c.c", "C1/a.c")],
        );
        // The projection closes the triangle at component level.
        let cg = fg.project_to_components().unwrap();
        assert_eq!(cg.edge_count(), 3);
        let level = affected_design_level(
            &members(&["C1", "C2", "C3"]),
            Level::Component,
            &fg,
            &cg,
            &[],
        );
        assert_eq!(level, DesignLevel::ComponentOnly);
    }

    #[test]
    fn file_cycle_local_to_one_member_does_not_lift_a_component_cycle() {
        // C1 and C2 cycle through two independent border files while the
        // only file cycle sits entirely inside C1.
        let fg = file_graph(
            &[("C1/a.c", "C1"), ("C1/b.c", "C1"), ("C2/x.c", "C2"), ("C2/y.c", "C2")],
            &[
                ("C1/a.c", "C1/b.c"),
                ("C1/b.c", "C1/a.c"),
                ("C1/a.c", "C2/x.c"),
                ("C2/y.c", "C1/b.c"),
            ],
        );
        let cg = fg.project_to_components().unwrap();
        let file_cycles = vec![members(&["C1/a.c", "C1/b.c"])];
        let level = affected_design_level(
            &members(&["C1", "C2"]),
            Level::Component,
            &fg,
            &cg,
            &file_cycles,
        );
        assert_eq!(level, DesignLevel::ComponentOnly, "the file cycle touches only C1");
    }
}
