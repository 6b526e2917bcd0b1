use crate::model::Scenario;

/// Iterates every STA -> RU map (with "unassigned" allowed) in which no AP
/// reuses an RU and STAs of different APs share an RU only when their APs
/// share a group.
///
/// STA 0 varies slowest; for each STA "unassigned" comes first, then RUs in
/// ascending order.
#[derive(Debug, Clone)]
pub struct AssignmentIter {
    ap_of: Vec<usize>,
    group_of_ap: Vec<usize>,
    n_rus: usize,
    /// Option index per STA: 0 = unassigned, `r + 1` = RU `r`.
    choice: Vec<usize>,
    level: usize,
    used: Vec<bool>,
    ru_count: Vec<usize>,
    ru_group: Vec<usize>,
    fresh: bool,
    finished: bool,
}

impl AssignmentIter {
    /// `group_of_ap[n]` is the block label of AP `n`.
    pub fn new(ap_of: Vec<usize>, group_of_ap: Vec<usize>, n_rus: usize) -> Self {
        let n_stas = ap_of.len();
        let n_aps = group_of_ap.len();
        Self {
            ap_of,
            group_of_ap,
            n_rus,
            choice: vec![0; n_stas],
            level: 0,
            used: vec![false; n_aps * n_rus],
            ru_count: vec![0; n_rus],
            ru_group: vec![0; n_rus],
            fresh: true,
            finished: false,
        }
    }

    fn fits(&self, u: usize, option: usize) -> bool {
        if option == 0 {
            return true;
        }
        let ru = option - 1;
        let ap = self.ap_of[u];
        !self.used[ap * self.n_rus + ru]
            && (self.ru_count[ru] == 0 || self.ru_group[ru] == self.group_of_ap[ap])
    }

    fn apply(&mut self, u: usize, option: usize) {
        if option == 0 {
            return;
        }
        let ru = option - 1;
        let ap = self.ap_of[u];
        self.used[ap * self.n_rus + ru] = true;
        self.ru_count[ru] += 1;
        self.ru_group[ru] = self.group_of_ap[ap];
    }

    fn undo(&mut self, u: usize, option: usize) {
        if option == 0 {
            return;
        }
        let ru = option - 1;
        self.used[self.ap_of[u] * self.n_rus + ru] = false;
        self.ru_count[ru] -= 1;
    }

    fn current(&self) -> Vec<Option<usize>> {
        self.choice.iter().map(|&c| c.checked_sub(1)).collect()
    }

    /// Pops the deepest placed STA and moves it to its next option.
    fn backtrack(&mut self) -> bool {
        if self.level == 0 {
            return false;
        }
        self.level -= 1;
        let (u, c) = (self.level, self.choice[self.level]);
        self.undo(u, c);
        self.choice[u] += 1;
        true
    }
}

impl Iterator for AssignmentIter {
    type Item = Vec<Option<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        if self.fresh {
            self.fresh = false;
        } else if !self.backtrack() {
            self.finished = true;
            return None;
        }
        let n = self.ap_of.len();
        loop {
            if self.level == n {
                return Some(self.current());
            }
            let u = self.level;
            while self.choice[u] <= self.n_rus && !self.fits(u, self.choice[u]) {
                self.choice[u] += 1;
            }
            if self.choice[u] <= self.n_rus {
                self.apply(u, self.choice[u]);
                self.level += 1;
                if self.level < n {
                    self.choice[self.level] = 0;
                }
            } else if !self.backtrack() {
                self.finished = true;
                return None;
            }
        }
    }
}

/// Every RU map of `scenario` admissible under the AP partition `labels`.
pub fn enumerate_assignments(scenario: &Scenario, labels: &[usize]) -> AssignmentIter {
    AssignmentIter::new(scenario.association.clone(), labels.to_vec(), scenario.params.num_rus)
}
