use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, lit, Real};

/// A point of the plane with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint<T> {
    re: T,
    im: T,
}

impl<T: Real> ComplexPoint<T> {
    pub fn new(re: T, im: T) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn re(&self) -> T {
        self.re
    }

    pub fn im(&self) -> T {
        self.im
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }
}

impl<T: Real> TryFrom<Complex<T>> for ComplexPoint<T> {
    type Error = Error;

    fn try_from(z: Complex<T>) -> Result<Self> {
        Self::new(z.re, z.im)
    }
}

impl<T: Real> From<ComplexPoint<T>> for Complex<T> {
    fn from(p: ComplexPoint<T>) -> Self {
        p.to_complex()
    }
}

/// One smooth arc of a contour, parameterized over `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment<T> {
    Line {
        start: Complex<T>,
        end: Complex<T>,
    },
    /// Arc of the circle `center + radius·e^{iθ}` for θ running from `theta0` to `theta1`.
    Arc {
        center: Complex<T>,
        radius: T,
        theta0: T,
        theta1: T,
    },
}

impl<T: Real> Segment<T> {
    pub fn line(start: Complex<T>, end: Complex<T>) -> Self {
        Segment::Line { start, end }
    }

    pub fn arc(center: Complex<T>, radius: T, theta0: T, theta1: T) -> Self {
        Segment::Arc {
            center,
            radius,
            theta0,
            theta1,
        }
    }

    /// Position and velocity at parameter `t`.
    pub fn eval(&self, t: T) -> (Complex<T>, Complex<T>) {
        match *self {
            Segment::Line { start, end } => (start + (end - start) * t, end - start),
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let span = theta1 - theta0;
                let theta = theta0 + span * t;
                let e = Complex::from_polar(radius, theta);
                (center + e, Complex::new(T::zero(), span) * e)
            }
        }
    }

    pub fn start(&self) -> Complex<T> {
        self.eval(T::zero()).0
    }

    pub fn end(&self) -> Complex<T> {
        self.eval(T::one()).0
    }

    pub fn length(&self) -> T {
        match *self {
            Segment::Line { start, end } => (end - start).norm(),
            Segment::Arc {
                radius,
                theta0,
                theta1,
                ..
            } => radius.abs() * (theta1 - theta0).abs(),
        }
    }
}

/// Ordered chain of arcs traversed forward; consecutive arcs share endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour<T> {
    segments: Vec<Segment<T>>,
}

impl<T: Real> Contour<T> {
    pub fn new(segments: Vec<Segment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("contour needs at least one segment".into()));
        }
        for s in &segments {
            if !is_finite_c(s.start()) || !is_finite_c(s.end()) || !s.length().is_finite() {
                return Err(Error::NonFinite);
            }
        }
        for pair in segments.windows(2) {
            let (a, b) = (pair[0].end(), pair[1].start());
            let scale = T::one() + a.norm().max(b.norm());
            if (a - b).norm() > lit::<T>(1e3) * T::epsilon() * scale {
                return Err(Error::InvalidParameter(format!(
                    "segments do not share endpoints: {:?} vs {:?}",
                    a, b
                )));
            }
        }
        Ok(Self { segments })
    }

    /// Straight segment from `a` to `b`.
    pub fn segment(a: Complex<T>, b: Complex<T>) -> Self {
        Self {
            segments: vec![Segment::line(a, b)],
        }
    }

    /// Polygonal path through `points`.
    pub fn polyline(points: &[Complex<T>]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("polyline needs two points".into()));
        }
        Self::new(points.windows(2).map(|w| Segment::line(w[0], w[1])).collect())
    }

    /// Full circle traversed once counter-clockwise.
    pub fn circle(center: Complex<T>, radius: T) -> Self {
        Self {
            segments: vec![Segment::arc(center, radius, T::zero(), T::PI() + T::PI())],
        }
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn start(&self) -> Complex<T> {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex<T> {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn length(&self) -> T {
        self.segments
            .iter()
            .fold(T::zero(), |acc, s| acc + s.length())
    }
}
