//! WebAssembly bindings for the keyframe selection demo in `www/`.
//!
//! Each binding takes its parameters as a JSON object. Missing fields take
//! the values returned by [`default_explorer_params`] and
//! [`default_view_params`]. The plain Rust functions in [`explorer`] and
//! [`viewer`] do the work and are usable natively.

pub mod explorer;
pub mod viewer;

use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("demo types serialize")
}

#[wasm_bindgen]
pub fn default_explorer_params() -> String {
    to_json(&explorer::ExplorerParams::default())
}

#[wasm_bindgen]
pub fn default_view_params() -> String {
    to_json(&viewer::ViewParams::default())
}

/// Runs the selector on a synthetic sequence; returns the comparison report
/// as JSON.
#[wasm_bindgen]
pub fn explore(params_json: &str) -> Result<String, JsError> {
    let params: explorer::ExplorerParams = serde_json::from_str(params_json).map_err(js_err)?;
    let report = explorer::explore(&params).map_err(js_err)?;
    Ok(to_json(&report))
}

/// Warps a keyframe into a displaced view and scores it.
#[wasm_bindgen]
pub fn warp_view(params_json: &str) -> Result<WarpImages, JsError> {
    let params: viewer::ViewParams = serde_json::from_str(params_json).map_err(js_err)?;
    viewer::view(&params).map(WarpImages).map_err(js_err)
}

/// JS handle on a [`viewer::WarpView`].
#[wasm_bindgen]
pub struct WarpImages(viewer::WarpView);

#[wasm_bindgen]
impl WarpImages {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.0.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn keyframe(&self) -> Vec<u8> {
        self.0.keyframe.clone()
    }

    pub fn current(&self) -> Vec<u8> {
        self.0.current.clone()
    }

    pub fn warped(&self) -> Vec<u8> {
        self.0.warped.clone()
    }

    pub fn ssim(&self) -> Vec<u8> {
        self.0.ssim.clone()
    }

    /// Scores and coverage as JSON, without the pixel buffers.
    pub fn scores(&self) -> String {
        let v = &self.0;
        to_json(&serde_json::json!({
            "e_photo": v.e_photo,
            "e_ssim": v.e_ssim,
            "e_t": v.e_t,
            "coverage": v.coverage,
            "degenerate": v.degenerate,
        }))
    }
}
