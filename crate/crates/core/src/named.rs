//! Built-in arrangements used throughout the tests and by the CLI.

use crate::poly::{Arrangement, Polynomial};

#[derive(Clone, Copy, Debug)]
pub struct NamedExample {
    pub name: &'static str,
    pub vars: &'static [&'static str],
    pub polys: &'static [&'static str],
    /// Fixed denominator reproducing published critical-point counts.
    pub denominator: Option<&'static str>,
    pub summary: &'static str,
}

impl NamedExample {
    pub fn arrangement(&self) -> Arrangement {
        Arrangement::parse(self.polys, self.vars).expect("built-in examples parse")
    }

    pub fn denominator(&self) -> Option<Polynomial> {
        self.denominator
            .map(|q| Polynomial::parse(q, self.vars).expect("built-in denominators parse"))
    }
}

pub const ELLIPSOIDS: NamedExample = NamedExample {
    name: "ellipsoids",
    vars: &["x", "y", "z"],
    polys: &[
        "x^2 + y^2 + z^2 - 1",
        "x^2 + y^2 + z^2 - 4",
        "100x^2 + 100y^2 + z^2 - 9",
    ],
    denominator: Some("(x+2)^2 + (y-3)^2 + (z-3)^2 + (2x+y)^2 + 4"),
    summary: "two concentric spheres pierced by a thin ellipsoid",
};

pub const HYPERBOLOID: NamedExample = NamedExample {
    name: "hyperboloid",
    vars: &["x", "y", "z"],
    polys: &[
        "z",
        "x^2 + y^2 - 1 + z",
        "x^2 + y^2 - 1 - z",
        "x^2 + y^2 - 1/4 - 3/2z^2",
    ],
    denominator: None,
    summary: "a plane, two paraboloids and a hyperboloid of one sheet",
};

pub const DISCRIMINANT8: NamedExample = NamedExample {
    name: "discriminant8",
    vars: &["x", "y"],
    polys: &[
        "x + y",
        "23x^6 + 60x^5*y + 50x^4*y^2 + 16x^3*y^3 + 3x^2*y^4 - 78x^5 \
         - 336x^4*y - 478x^3*y^2 - 284x^2*y^3 - 76x*y^4 - 12y^5 - 87x^4 \
         - 144x^3*y + 54x^2*y^2 + 180x*y^3 + 68y^4 + 28x^3 + 24x^2*y \
         - 58x*y^2 - 56y^3 - 87x^2 - 300x*y - 208y^2 - 78x - 72y + 23",
        "x + 3y + 1",
        "5x^2 + 4x*y + y^2 - 6x - 4y + 5",
    ],
    denominator: None,
    summary: "factors of the discriminant of a univariate octic pencil",
};

pub const ELLIPTOPE: NamedExample = NamedExample {
    name: "elliptope",
    vars: &["x", "y", "z"],
    polys: &[
        "x - 1",
        "x + 1",
        "y - 1",
        "y + 1",
        "z - 1",
        "z + 1",
        "2x*y*z - x^2 - y^2 - z^2 + 1",
    ],
    denominator: None,
    summary: "the cube [-1,1]^3 and the Cayley cubic bounding the elliptope",
};

pub const PARABOLOIDS: NamedExample = NamedExample {
    name: "paraboloids",
    vars: &["x", "y", "z"],
    polys: &[
        "3 + x + 3*y - z + (1 + 2*x + 4*y - 4*z)^2 + (2 + 3*x + 2*y + 3*z)^2",
        "3 + x + 3*z + (3 - 3*x - 2*z)^2 + (3 + 3*x + 3*y + 4*z)^2",
        "2 - 2*x - 2*y - 3*z + (2 - x + 4*z)^2 + (2 + 3*x + y + 2*z)^2",
        "1 - 3*x + 3*y - 3*z + (1 - 2*y + 2*z)^2 + (2 + x + 4*y)^2",
    ],
    denominator: None,
    summary: "four paraboloids in R^3, each tangent to the plane at infinity",
};

pub const ALL: [NamedExample; 5] = [ELLIPSOIDS, HYPERBOLOID, DISCRIMINANT8, ELLIPTOPE, PARABOLOIDS];

pub fn by_name(name: &str) -> Option<NamedExample> {
    ALL.iter().copied().find(|e| e.name == name)
}
