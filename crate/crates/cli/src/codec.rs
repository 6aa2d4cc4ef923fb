//! JSON points and scales for each model, and their CSV rendering.

use dilatation_core::dd::{lift, lower};
use dilatation_core::models::{
    CarnotGroup, ComplexHeisenbergModel, ComplexHeisenbergPoint, ConicalGroup, DyadicBoundaryModel, DyadicPoint,
    EuclideanModel, HeisenbergModel, HeisenbergPoint, PullbackModel,
};
use dilatation_core::qd::{self, Qd};
use dilatation_core::{ComplexScale, Dd, DilatationStructure, DyadicPower, PositiveReal, Scale};
use num_complex::Complex64;
use serde_json::Value;

use crate::config::ScaleValue;
use crate::error::CliError;

fn coords(v: &Value) -> Result<Vec<f64>, CliError> {
    let arr = v.as_array().ok_or_else(|| CliError::Config(format!("expected a coordinate array, got {v}")))?;
    arr.iter().map(|c| c.as_f64().ok_or_else(|| CliError::Config(format!("coordinate {c} is not a number")))).collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn dims(v: Vec<f64>, n: usize) -> Result<Vec<f64>, CliError> {
    if v.len() == n {
        Ok(v)
    } else {
        Err(CliError::Config(format!("expected {n} coordinates, got {}", v.len())))
    }
}

fn real_scale<S: Scale>(v: &ScaleValue) -> Result<S, CliError> {
    match v {
        ScaleValue::Real(r) => Ok(S::from_nu(*r)?),
        ScaleValue::Complex(c) => Err(CliError::Config(format!("this model takes real scales, got {c:?}"))),
    }
}

/// How a model reads points and scales from a config and prints points.
pub trait Codec: DilatationStructure {
    fn parse_point(&self, v: &Value) -> Result<Self::Point, CliError>;

    fn format_point(&self, p: &Self::Point) -> String;

    /// Default centre of sampled regions.
    fn origin(&self) -> Self::Point;

    fn parse_scale(&self, v: &ScaleValue) -> Result<Self::Scale, CliError> {
        real_scale(v)
    }

    /// ε as a plain number when the scale is real.
    fn real_value(&self, s: &Self::Scale) -> f64 {
        s.nu()
    }
}

impl Codec for EuclideanModel {
    fn parse_point(&self, v: &Value) -> Result<Vec<Dd>, CliError> {
        Ok(lift(&dims(coords(v)?, self.dim())?))
    }

    fn format_point(&self, p: &Vec<Dd>) -> String {
        join(&lower(p))
    }

    fn origin(&self) -> Vec<Dd> {
        self.identity()
    }

    fn real_value(&self, s: &PositiveReal) -> f64 {
        s.value()
    }
}

impl Codec for HeisenbergModel {
    /// `[x_1, …, x_2n, x̄]`.
    fn parse_point(&self, v: &Value) -> Result<HeisenbergPoint, CliError> {
        Ok(HeisenbergPoint::from_flat(&dims(coords(v)?, 2 * self.n() + 1)?)?)
    }

    fn format_point(&self, p: &HeisenbergPoint) -> String {
        join(&p.to_flat())
    }

    fn origin(&self) -> HeisenbergPoint {
        self.identity()
    }

    fn real_value(&self, s: &PositiveReal) -> f64 {
        s.value()
    }
}

impl Codec for CarnotGroup {
    fn parse_point(&self, v: &Value) -> Result<Vec<Qd>, CliError> {
        Ok(self.point(&coords(v)?)?)
    }

    fn format_point(&self, p: &Vec<Qd>) -> String {
        join(&qd::lower(p))
    }

    fn origin(&self) -> Vec<Qd> {
        self.identity()
    }

    fn real_value(&self, s: &PositiveReal) -> f64 {
        s.value()
    }
}

impl Codec for DyadicBoundaryModel {
    /// A word such as `"0110"` (first letter first) or a non-negative integer.
    fn parse_point(&self, v: &Value) -> Result<DyadicPoint, CliError> {
        match v {
            Value::String(w) => Ok(self.from_word(w)?),
            Value::Number(n) => n
                .as_u64()
                .map(|d| self.point(d))
                .ok_or_else(|| CliError::Config(format!("dyadic integer {n} is not a u64"))),
            other => Err(CliError::Config(format!("expected a word or an integer, got {other}"))),
        }
    }

    fn format_point(&self, p: &DyadicPoint) -> String {
        self.to_word(p)
    }

    fn origin(&self) -> DyadicPoint {
        self.identity()
    }

    fn parse_scale(&self, v: &ScaleValue) -> Result<DyadicPower, CliError> {
        real_scale(v)
    }
}

impl Codec for ComplexHeisenbergModel {
    /// `[Re x, Im x, x′]`.
    fn parse_point(&self, v: &Value) -> Result<ComplexHeisenbergPoint, CliError> {
        Ok(ComplexHeisenbergPoint::from_flat(&coords(v)?)?)
    }

    fn format_point(&self, p: &ComplexHeisenbergPoint) -> String {
        join(&p.to_flat())
    }

    fn origin(&self) -> ComplexHeisenbergPoint {
        self.identity()
    }

    /// A real number (of either sign) or `[re, im]`.
    fn parse_scale(&self, v: &ScaleValue) -> Result<ComplexScale, CliError> {
        Ok(match v {
            ScaleValue::Real(r) => ComplexScale::real(*r)?,
            ScaleValue::Complex([re, im]) => ComplexScale::new(Complex64::new(*re, *im))?,
        })
    }

    fn real_value(&self, s: &ComplexScale) -> f64 {
        s.value().re
    }
}

impl Codec for PullbackModel {
    fn parse_point(&self, v: &Value) -> Result<Vec<f64>, CliError> {
        dims(coords(v)?, self.dim())
    }

    fn format_point(&self, p: &Vec<f64>) -> String {
        join(p)
    }

    fn origin(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    fn real_value(&self, s: &PositiveReal) -> f64 {
        s.value()
    }
}
