#pragma once

#include <map>
#include <string>

#include "tutorforge/raster.hpp"
#include "tutorforge/sheet.hpp"

namespace tutorforge {

// Colors pixel tests rely on.
inline constexpr Rgb kSelectionTint{186, 210, 240};
inline constexpr Rgb kSelectionBorder{46, 92, 160};
inline constexpr Rgb kGridLine{208, 213, 221};
inline constexpr Rgb kAnnotationRed{255, 0, 0};

/// Deterministic raster of the full application plus a sidecar index mapping
/// accessibility node ids to their bboxes (not burned into pixels).
struct Screenshot {
    Raster raster{kCanvasWidth, kCanvasHeight};
    std::map<std::string, PixelRect> region_index;

    int width() const { return raster.width(); }
    int height() const { return raster.height(); }
};

/// Pure function of the state: ribbon strip, headers, grid with cell text,
/// selection highlight, charts, then open menus and dialogs topmost.
Screenshot render_screenshot(const AppState& state);

}  // namespace tutorforge
