//! Induced `C_4` detection by exchanging full neighbour lists.

use super::{NodeContext, Received, StagedLogic, StagedProgram};

pub struct NaiveC4;

pub fn naive_c4_program() -> StagedProgram<NaiveC4> {
    StagedProgram(NaiveC4)
}

impl StagedLogic for NaiveC4 {
    type Local = ();

    fn name(&self) -> String {
        "naive-c4".into()
    }

    fn stages(&self) -> usize {
        1
    }

    fn item_bits(&self, _: usize, ctx: &NodeContext) -> usize {
        ctx.id_bits()
    }

    fn init(&self, _: &NodeContext) {}

    fn emit(&self, _: &mut (), ctx: &NodeContext, _: usize, _: &Received) -> Vec<Vec<u64>> {
        let list: Vec<u64> = ctx.neighbors.iter().map(|&w| w as u64).collect();
        vec![list; ctx.neighbors.len()]
    }

    /// `v` is on an induced 4-cycle `v u t w` iff two non-adjacent neighbours
    /// `u`, `w` share a neighbour `t` outside `N[v]`.
    fn finish(&self, _: &mut (), ctx: &NodeContext, received: &Received) -> bool {
        let nbrs = ctx.neighbors;
        let lists: Vec<Vec<usize>> =
            received.stage(0).iter().map(|l| l.iter().map(|&x| x as usize).collect()).collect();
        let adjacent = |pu: usize, w: usize| lists[pu].binary_search(&w).is_ok();
        for pu in 0..nbrs.len() {
            for pw in pu + 1..nbrs.len() {
                if adjacent(pu, nbrs[pw]) {
                    continue;
                }
                let hit = lists[pu]
                    .iter()
                    .any(|&t| t != ctx.id && nbrs.binary_search(&t).is_err() && lists[pw].binary_search(&t).is_ok());
                if hit {
                    return true;
                }
            }
        }
        false
    }
}
