//! Subtree contours: per depth, the leftmost and rightmost extent of a
//! subtree relative to its root.
//!
//! Two interchangeable representations. [`Naive`] keeps both sides as plain
//! arrays and pays for every shift and merge in full. [`Threaded`] stores each
//! side as a delta-encoded linked list in an arena, so a shift is O(1) and a
//! merge or distance query only touches the shallower of the two contours.
//! Both count the contour entries they touch.

/// Padding between a prefix and a new sibling at relative depth `d`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Pads {
    pub sibling: f64,
    pub subtree: f64,
}

impl Pads {
    pub fn at(self, d: usize) -> f64 {
        if d == 0 {
            self.sibling
        } else {
            self.subtree
        }
    }
}

pub(crate) trait Contours {
    type C;

    /// Contour of a single node of the given width.
    fn leaf(&mut self, width: f64) -> Self::C;

    /// Smallest shift of `right` so that at every common depth it clears
    /// `left` by the padding.
    fn required_shift(&mut self, left: &Self::C, right: &Self::C, pads: Pads) -> f64;

    fn shift(&mut self, c: &mut Self::C, dx: f64);

    /// Union of a prefix and a sibling placed to its right, both already in
    /// the same frame.
    fn merge(&mut self, prefix: Self::C, right: Self::C) -> Self::C;

    /// Shifts the merged children contour by `dx` and puts the parent, of
    /// the given width, on top.
    fn adopt(&mut self, children: Option<Self::C>, dx: f64, width: f64) -> Self::C;

    #[cfg(test)]
    fn sides(&self, c: &Self::C) -> (Vec<f64>, Vec<f64>);

    fn steps(&self) -> u64;
}

#[derive(Clone, Debug)]
pub(crate) struct ArrayContour {
    left: Vec<f64>,
    right: Vec<f64>,
}

#[derive(Default)]
pub(crate) struct Naive {
    steps: u64,
}

impl Contours for Naive {
    type C = ArrayContour;

    fn leaf(&mut self, width: f64) -> ArrayContour {
        self.steps += 1;
        ArrayContour {
            left: vec![-width / 2.0],
            right: vec![width / 2.0],
        }
    }

    fn required_shift(&mut self, left: &ArrayContour, right: &ArrayContour, pads: Pads) -> f64 {
        let mut need = f64::NEG_INFINITY;
        for (d, (r, l)) in left.right.iter().zip(&right.left).enumerate() {
            self.steps += 1;
            need = need.max(r + pads.at(d) - l);
        }
        need
    }

    fn shift(&mut self, c: &mut ArrayContour, dx: f64) {
        self.steps += (c.left.len() + c.right.len()) as u64;
        c.left.iter_mut().for_each(|x| *x += dx);
        c.right.iter_mut().for_each(|x| *x += dx);
    }

    fn merge(&mut self, prefix: ArrayContour, right: ArrayContour) -> ArrayContour {
        let mut left = prefix.left;
        if right.left.len() > left.len() {
            left.extend_from_slice(&right.left[left.len()..]);
        }
        let mut r = right.right;
        if prefix.right.len() > r.len() {
            r.extend_from_slice(&prefix.right[r.len()..]);
        }
        self.steps += (left.len() + r.len()) as u64;
        ArrayContour { left, right: r }
    }

    fn adopt(&mut self, children: Option<ArrayContour>, dx: f64, width: f64) -> ArrayContour {
        let mut out = self.leaf(width);
        if let Some(mut c) = children {
            self.shift(&mut c, dx);
            out.left.append(&mut c.left);
            out.right.append(&mut c.right);
        }
        out
    }

    #[cfg(test)]
    fn sides(&self, c: &ArrayContour) -> (Vec<f64>, Vec<f64>) {
        (c.left.clone(), c.right.clone())
    }

    fn steps(&self) -> u64 {
        self.steps
    }
}

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Entry {
    delta: f64,
    next: u32,
}

/// One side: value at depth `d` is `offset` plus the deltas of entries
/// `0..=d`.
#[derive(Clone, Copy, Debug)]
struct Side {
    head: u32,
    tail: u32,
    len: usize,
    offset: f64,
    /// Value of the tail entry minus `offset`.
    tail_rel: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct ThreadedContour {
    left: Side,
    right: Side,
}

#[derive(Default)]
pub(crate) struct Threaded {
    arena: Vec<Entry>,
    steps: u64,
}

impl Threaded {
    fn push(&mut self, delta: f64) -> u32 {
        self.arena.push(Entry { delta, next: NIL });
        (self.arena.len() - 1) as u32
    }

    fn single(&mut self, value: f64) -> Side {
        let e = self.push(value);
        Side {
            head: e,
            tail: e,
            len: 1,
            offset: 0.0,
            tail_rel: value,
        }
    }

    /// Entry at depth `d` of `s` and its value.
    fn seek(&mut self, s: &Side, d: usize) -> (u32, f64) {
        let mut idx = s.head;
        let mut v = s.offset + self.arena[idx as usize].delta;
        for _ in 0..d {
            self.steps += 1;
            idx = self.arena[idx as usize].next;
            v += self.arena[idx as usize].delta;
        }
        (idx, v)
    }

    /// `top` over its own depths, then `bottom` below them. `bottom` must be
    /// strictly deeper.
    fn splice(&mut self, top: Side, bottom: Side) -> Side {
        let (e, v) = self.seek(&bottom, top.len);
        self.arena[e as usize].delta = v - (top.offset + top.tail_rel);
        self.arena[top.tail as usize].next = e;
        Side {
            head: top.head,
            tail: bottom.tail,
            len: bottom.len,
            offset: top.offset,
            tail_rel: bottom.offset + bottom.tail_rel - top.offset,
        }
    }

    fn prepend(&mut self, s: Side, value: f64) -> Side {
        let head = self.arena[s.head as usize];
        let e = self.push(value);
        self.arena[s.head as usize].delta = s.offset + head.delta - value;
        self.arena[e as usize].next = s.head;
        Side {
            head: e,
            tail: s.tail,
            len: s.len + 1,
            offset: 0.0,
            tail_rel: s.offset + s.tail_rel,
        }
    }

    #[cfg(test)]
    fn values(&self, s: &Side) -> Vec<f64> {
        let mut out = Vec::with_capacity(s.len);
        let mut idx = s.head;
        let mut v = s.offset;
        for _ in 0..s.len {
            let e = self.arena[idx as usize];
            v += e.delta;
            out.push(v);
            idx = e.next;
        }
        out
    }
}

impl Contours for Threaded {
    type C = ThreadedContour;

    fn leaf(&mut self, width: f64) -> ThreadedContour {
        self.steps += 1;
        ThreadedContour {
            left: self.single(-width / 2.0),
            right: self.single(width / 2.0),
        }
    }

    fn required_shift(
        &mut self,
        left: &ThreadedContour,
        right: &ThreadedContour,
        pads: Pads,
    ) -> f64 {
        let (a, b) = (left.right, right.left);
        let (mut ia, mut ib) = (a.head, b.head);
        let (mut va, mut vb) = (a.offset, b.offset);
        let mut need = f64::NEG_INFINITY;
        for d in 0..a.len.min(b.len) {
            self.steps += 1;
            let (ea, eb) = (self.arena[ia as usize], self.arena[ib as usize]);
            va += ea.delta;
            vb += eb.delta;
            need = need.max(va + pads.at(d) - vb);
            ia = ea.next;
            ib = eb.next;
        }
        need
    }

    fn shift(&mut self, c: &mut ThreadedContour, dx: f64) {
        self.steps += 1;
        c.left.offset += dx;
        c.right.offset += dx;
    }

    fn merge(&mut self, prefix: ThreadedContour, right: ThreadedContour) -> ThreadedContour {
        self.steps += 1;
        let left = if right.left.len > prefix.left.len {
            self.splice(prefix.left, right.left)
        } else {
            prefix.left
        };
        let r = if prefix.right.len > right.right.len {
            self.splice(right.right, prefix.right)
        } else {
            right.right
        };
        ThreadedContour { left, right: r }
    }

    fn adopt(&mut self, children: Option<ThreadedContour>, dx: f64, width: f64) -> ThreadedContour {
        match children {
            None => self.leaf(width),
            Some(mut c) => {
                self.shift(&mut c, dx);
                self.steps += 1;
                ThreadedContour {
                    left: self.prepend(c.left, -width / 2.0),
                    right: self.prepend(c.right, width / 2.0),
                }
            }
        }
    }

    #[cfg(test)]
    fn sides(&self, c: &ThreadedContour) -> (Vec<f64>, Vec<f64>) {
        (self.values(&c.left), self.values(&c.right))
    }

    fn steps(&self) -> u64 {
        self.steps
    }
}
