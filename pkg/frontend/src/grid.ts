/** Heatmap grid geometry and pixel hit-testing. */

export interface GridGeometry {
  originX: number;
  originY: number;
  cellWidth: number;
  cellHeight: number;
  columns: number;
  rows: number;
}

export interface Margins {
  left: number;
  top: number;
  right: number;
  bottom: number;
}

export const DEFAULT_MARGINS: Margins = { left: 150, top: 16, right: 16, bottom: 110 };

export function layoutGrid(
  canvasWidth: number,
  canvasHeight: number,
  columns: number,
  rows: number,
  margins: Margins = DEFAULT_MARGINS,
): GridGeometry {
  const plotWidth = Math.max(1, canvasWidth - margins.left - margins.right);
  const plotHeight = Math.max(1, canvasHeight - margins.top - margins.bottom);
  return {
    originX: margins.left,
    originY: margins.top,
    cellWidth: plotWidth / Math.max(1, columns),
    cellHeight: plotHeight / Math.max(1, rows),
    columns,
    rows,
  };
}

export interface CellIndex {
  xi: number;
  yi: number;
}

/** Cell under a pixel, or null outside the grid. */
export function cellAt(geometry: GridGeometry, px: number, py: number): CellIndex | null {
  const dx = px - geometry.originX;
  const dy = py - geometry.originY;
  if (dx < 0 || dy < 0) return null;
  const xi = Math.floor(dx / geometry.cellWidth);
  const yi = Math.floor(dy / geometry.cellHeight);
  if (xi >= geometry.columns || yi >= geometry.rows) return null;
  return { xi, yi };
}

export interface CellRect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export function cellRect(geometry: GridGeometry, xi: number, yi: number): CellRect {
  return {
    x: geometry.originX + xi * geometry.cellWidth,
    y: geometry.originY + yi * geometry.cellHeight,
    width: geometry.cellWidth,
    height: geometry.cellHeight,
  };
}
