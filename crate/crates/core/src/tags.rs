//! Region labels for points of the line and of its tropical limit.
//!
//! Classification near a seam returns every label whose closed condition
//! holds, so labels come as small sets rather than single values.

use std::fmt;
use std::marker::PhantomData;
use std::str::FromStr;

use crate::error::{domain, Error};

pub trait Tag: Copy + Eq + fmt::Debug + 'static {
    /// All variants in their canonical (evaluation) order.
    const ALL: &'static [Self];
    fn index(self) -> u8;
    /// Short code used in frame files.
    fn code(self) -> &'static str;
}

/// Bitset over a [`Tag`] enum; iteration follows the canonical order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TagSet<T: Tag> {
    mask: u8,
    _tag: PhantomData<T>,
}

impl<T: Tag> TagSet<T> {
    pub const fn empty() -> Self {
        TagSet { mask: 0, _tag: PhantomData }
    }

    pub fn single(t: T) -> Self {
        Self::empty().with(t)
    }

    pub fn with(mut self, t: T) -> Self {
        self.insert(t);
        self
    }

    pub fn insert(&mut self, t: T) {
        self.mask |= 1 << t.index();
    }

    pub fn contains(&self, t: T) -> bool {
        self.mask & (1 << t.index()) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        T::ALL.iter().copied().filter(move |t| self.contains(*t))
    }

    pub fn first(&self) -> Option<T> {
        self.iter().next()
    }

    pub fn map<U: Tag>(&self, f: impl Fn(T) -> U) -> TagSet<U> {
        self.iter().fold(TagSet::empty(), |s, t| s.with(f(t)))
    }
}

impl<T: Tag> Default for TagSet<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Tag> fmt::Debug for TagSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `h1|h3` style, empty set prints as `-`.
impl<T: Tag> fmt::Display for TagSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        for (i, t) in self.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            f.write_str(t.code())?;
        }
        Ok(())
    }
}

impl<T: Tag> FromStr for TagSet<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Self::empty());
        }
        s.split('|').try_fold(Self::empty(), |set, code| {
            T::ALL
                .iter()
                .find(|t| t.code() == code)
                .map(|t| set.with(*t))
                .ok_or_else(|| domain(format!("unknown tag {code:?}")))
        })
    }
}

impl<T: Tag> FromIterator<T> for TagSet<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        iter.into_iter().fold(Self::empty(), |s, t| s.with(t))
    }
}

macro_rules! tag_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $code:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name { $($variant),+ }

        impl Tag for $name {
            const ALL: &'static [Self] = &[$($name::$variant),+];
            fn index(self) -> u8 { self as u8 }
            fn code(self) -> &'static str {
                match self { $($name::$variant => $code),+ }
            }
        }
    };
}

tag_enum!(
    /// The three pieces `x ≤ y, x ≤ 0`, `y ≤ x, y ≤ 0` and `x, y ≥ 0`.
    Major { H1 => "h1", H2 => "h2", H3 => "h3" }
);

tag_enum!(
    /// Leg (`y ≥ 2x + ln 2`) or triangle (`y ≤ 2x + ln 2`) part of the first
    /// piece. Triangle is evaluated first at the seam.
    Sub { Triangle => "tri", Leg => "leg" }
);

tag_enum!(
    /// Which closed coamoeba triangle of the first piece: `φ ≤ π` (lower,
    /// flowed from `O`) or `φ ≥ π` (upper, flowed from `O′`).
    Side { Lower => "lo", Upper => "up" }
);

tag_enum!(
    /// The three pieces of the phase tropical line.
    TropPart { H1Trop => "h1trop", H2Trop => "h2trop", H3Trop => "h3trop" }
);

impl Major {
    pub fn next(self) -> Major {
        match self {
            Major::H1 => Major::H2,
            Major::H2 => Major::H3,
            Major::H3 => Major::H1,
        }
    }

    pub fn trop(self) -> TropPart {
        match self {
            Major::H1 => TropPart::H1Trop,
            Major::H2 => TropPart::H2Trop,
            Major::H3 => TropPart::H3Trop,
        }
    }
}

/// Full classification of a point of the line.
///
/// `sub` and `side` are computed on the image of the point in the first piece
/// (through the order-three automorphism), for the first major in `major`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegionTag {
    pub major: TagSet<Major>,
    pub sub: TagSet<Sub>,
    pub side: TagSet<Side>,
}
