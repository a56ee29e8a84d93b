//! Switches that deliberately break selected algorithms so the verification
//! registry can be shown to notice. Compiled only with the
//! `mutation-hooks` feature; state is per thread.

use std::cell::Cell;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Congruence generation forgets to propagate through meets.
    DropMeetPropagation,
    /// Closure uses the smallest element of the zero class instead of the largest.
    ClosureFromZeroClassMinimum,
    /// The largest congruence dense in `C` tests `a ∧ x = 0` instead of `a ∧ x ~ 0`.
    DenseInIgnoresCongruence,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [
        Mutation::DropMeetPropagation,
        Mutation::ClosureFromZeroClassMinimum,
        Mutation::DenseInIgnoresCongruence,
    ];
}

thread_local! {
    static ACTIVE: Cell<Option<Mutation>> = const { Cell::new(None) };
}

/// Runs `f` with `m` switched on in the current thread.
pub fn with_mutation<R>(m: Mutation, f: impl FnOnce() -> R) -> R {
    struct Reset(Option<Mutation>);
    impl Drop for Reset {
        fn drop(&mut self) {
            ACTIVE.with(|a| a.set(self.0));
        }
    }
    let _reset = Reset(ACTIVE.with(|a| a.replace(Some(m))));
    f()
}

pub(crate) fn is_active(m: Mutation) -> bool {
    ACTIVE.with(|a| a.get() == Some(m))
}
