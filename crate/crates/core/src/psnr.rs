use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::scalar::Real;

pub const DEFAULT_PSNR_CAP_DB: f64 = 100.0;

/// Mean squared error between two images of identical shape.
pub fn mse<T: Real>(a: &ImageBuffer<T>, b: &ImageBuffer<T>) -> Result<T> {
    if !a.same_shape(b) {
        return Err(Error::validation(format!(
            "psnr inputs differ in shape: {}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels().count(),
            b.width(),
            b.height(),
            b.channels().count()
        )));
    }
    let sum = a.pixels().iter().zip(b.pixels()).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    });
    Ok(sum / T::of_usize(a.pixels().len()))
}

/// PSNR with peak 1, capped at `cap_db`.
pub fn psnr<T: Real>(a: &ImageBuffer<T>, b: &ImageBuffer<T>, cap_db: T) -> Result<T> {
    if !(cap_db > T::zero()) || !cap_db.finite() {
        return Err(Error::validation("psnr cap must be a positive finite number"));
    }
    Ok(psnr_from_mse(mse(a, b)?, cap_db))
}

/// `10 log10(1 / mse)`, or `cap_db` when that exceeds the cap or `mse` is zero.
pub fn psnr_from_mse<T: Real>(mse: T, cap_db: T) -> T {
    if mse <= T::zero() {
        return cap_db;
    }
    let db = -T::of(10.0) * mse.log10();
    if db > cap_db {
        cap_db
    } else {
        db
    }
}
