use super::PipelineError;
use crate::defaults::EARTH_RADIUS_M;

/// Great-circle distance on a sphere of radius 6 371 km (haversine formula).
pub fn geodesic_distance(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64, PipelineError> {
    for (lat, lon) in [(lat1, lon1), (lat2, lon2)] {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(PipelineError::InvalidCoordinate(format!("({lat}, {lon})")));
        }
    }
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    Ok(2.0 * EARTH_RADIUS_M * a.sqrt().atan2((1.0 - a).sqrt()))
}

/// Slant range from ground distance and the two antenna heights.
pub fn compose_d3d(d2d: f64, h_uav: f64, h_rx: f64) -> f64 {
    d2d.hypot(h_uav - h_rx)
}
