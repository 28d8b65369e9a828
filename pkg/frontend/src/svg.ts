/**
 * Minimal SVG backend for the double-logarithmic convergence figures: a
 * framed log-log plot area with decade grid lines, one polyline + markers per
 * curve, dashed black reference lines, and a legend column on the right.
 */

import { PlotData, Series } from "./series.js";

export interface RenderOptions {
  width?: number;
  height?: number;
  title?: string;
}

const MARGIN = { top: 40, right: 250, bottom: 55, left: 75 };

function decades(min: number, max: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(min)); Math.pow(10, e) <= max * (1 + 1e-12); e++) {
    out.push(Math.pow(10, e));
  }
  return out;
}

function marker(shape: Series["marker"], cx: number, cy: number, color: string): string {
  const r = 3.5;
  switch (shape) {
    case "circle":
      return `<circle cx="${cx}" cy="${cy}" r="${r}" fill="${color}"/>`;
    case "square":
      return `<rect x="${cx - r}" y="${cy - r}" width="${2 * r}" height="${2 * r}" fill="none" stroke="${color}"/>`;
    case "x":
      return `<path d="M${cx - r} ${cy - r}L${cx + r} ${cy + r}M${cx - r} ${cy + r}L${cx + r} ${cy - r}" stroke="${color}" fill="none"/>`;
    case "triangle":
      return `<path d="M${cx} ${cy - r}L${cx + r} ${cy + r}L${cx - r} ${cy + r}Z" fill="none" stroke="${color}"/>`;
    case "triangle-down":
      return `<path d="M${cx} ${cy + r}L${cx + r} ${cy - r}L${cx - r} ${cy - r}Z" fill="none" stroke="${color}"/>`;
    case "diamond":
      return `<path d="M${cx} ${cy - r}L${cx + r} ${cy}L${cx} ${cy + r}L${cx - r} ${cy}Z" fill="none" stroke="${color}"/>`;
  }
}

export function renderSvg(data: PlotData, opts: RenderOptions = {}): string {
  const width = opts.width ?? 900;
  const height = opts.height ?? 560;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = data.series.flatMap((s) => s.x).concat(data.refs.flatMap((r) => r.x));
  const ys = data.series
    .flatMap((s) => s.y)
    .concat(data.refs.flatMap((r) => r.y))
    .filter((v) => v > 0);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);

  const lx = (v: number) => Math.log10(v);
  const padX = xMin === xMax ? 0.5 : 0.03 * (lx(xMax) - lx(xMin));
  const padY = yMin === yMax ? 0.5 : 0.05 * (lx(yMax) - lx(yMin));
  const x0 = lx(xMin) - padX;
  const x1 = lx(xMax) + padX;
  const y0 = lx(yMin) - padY;
  const y1 = lx(yMax) + padY;

  const sx = (v: number) => MARGIN.left + ((lx(v) - x0) / (x1 - x0)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((lx(v) - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" font-family="Helvetica, Arial, sans-serif" font-size="12">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (opts.title) {
    parts.push(`<text x="${MARGIN.left + plotW / 2}" y="22" text-anchor="middle" font-size="15">${opts.title}</text>`);
  }

  // frame and decade grid
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#444"/>`);
  for (const gx of decades(Math.pow(10, x0), Math.pow(10, x1))) {
    const px = sx(gx);
    parts.push(`<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${MARGIN.top + plotH}" stroke="#ddd"/>`);
    parts.push(`<text x="${px}" y="${MARGIN.top + plotH + 18}" text-anchor="middle">1e${Math.round(Math.log10(gx))}</text>`);
  }
  for (const gy of decades(Math.pow(10, y0), Math.pow(10, y1))) {
    const py = sy(gy);
    parts.push(`<line x1="${MARGIN.left}" y1="${py}" x2="${MARGIN.left + plotW}" y2="${py}" stroke="#ddd"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${py + 4}" text-anchor="end">1e${Math.round(Math.log10(gy))}</text>`);
  }
  parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" text-anchor="middle">degrees of freedom</text>`);

  // reference guide lines
  for (const ref of data.refs) {
    const d = `M${sx(ref.x[0])} ${sy(ref.y[0])}L${sx(ref.x[1])} ${sy(ref.y[1])}`;
    parts.push(`<path class="refline" d="${d}" stroke="black" stroke-dasharray="6 4" fill="none"/>`);
    parts.push(`<text x="${sx(ref.x[1])}" y="${sy(ref.y[1]) - 6}" text-anchor="end">${ref.label}</text>`);
  }

  // curves
  for (const s of data.series) {
    const pts = s.x.map((v, i) => [sx(v), sy(s.y[i])] as const).filter((p) => p.every(Number.isFinite));
    const dash = s.dashed ? ` stroke-dasharray="7 4"` : "";
    if (pts.length > 1) {
      const d = "M" + pts.map((p) => `${p[0]} ${p[1]}`).join("L");
      parts.push(`<path class="curve" data-column="${s.column}" d="${d}" stroke="${s.color}" stroke-width="1.8" fill="none"${dash}/>`);
    }
    for (const [px, py] of pts) {
      parts.push(marker(s.marker, px, py, s.color));
    }
  }

  // legend
  let ly = MARGIN.top + 10;
  for (const s of data.series) {
    const lx0 = MARGIN.left + plotW + 18;
    const dash = s.dashed ? ` stroke-dasharray="7 4"` : "";
    parts.push(`<line x1="${lx0}" y1="${ly}" x2="${lx0 + 28}" y2="${ly}" stroke="${s.color}" stroke-width="1.8"${dash}/>`);
    parts.push(marker(s.marker, lx0 + 14, ly, s.color));
    parts.push(`<text x="${lx0 + 36}" y="${ly + 4}">${escapeXml(s.label)}</text>`);
    ly += 22;
  }

  parts.push("</svg>");
  return parts.join("\n");
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
