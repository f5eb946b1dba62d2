/**
 * Pure SVG builders. Geometry only: every number printed as text comes
 * straight from an API payload field, never from client-side statistics.
 */

import type { CorrelationDoc, DensityDoc, DistributionEntry, RegionsDoc, ScatterDoc } from "./types.js";

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

const PALETTE = [
  "#4574a8", "#d1605e", "#67a165", "#8867a8", "#c2973f",
  "#5ba3b0", "#b35d8c", "#7f7f7f", "#9b6f43", "#637939",
];

export function barChart(entries: DistributionEntry[], width = 560, height = 260): string {
  if (!entries.length) return `<svg class="chart" viewBox="0 0 ${width} ${height}"></svg>`;
  const maxValue = Math.max(...entries.map((e) => e.affiliate_total), 1);
  const baseline = height - 60;
  const band = width / entries.length;
  const barWidth = Math.min(band * 0.7, 90);
  const parts = entries.map((entry, i) => {
    const barHeight = (entry.affiliate_total / maxValue) * (baseline - 30);
    const x = band * i + (band - barWidth) / 2;
    const y = baseline - barHeight;
    const color = PALETTE[i % PALETTE.length];
    return (
      `<rect data-level="${escapeHtml(entry.level)}" x="${x.toFixed(1)}" y="${y.toFixed(1)}"` +
      ` width="${barWidth.toFixed(1)}" height="${barHeight.toFixed(1)}" fill="${color}"></rect>` +
      `<text class="bar-value" x="${(x + barWidth / 2).toFixed(1)}" y="${(y - 6).toFixed(1)}"` +
      ` text-anchor="middle">${entry.affiliate_total}</text>` +
      `<text class="bar-label" x="${(x + barWidth / 2).toFixed(1)}" y="${baseline + 14}"` +
      ` text-anchor="middle">${escapeHtml(shorten(entry.level))}</text>`
    );
  });
  return (
    `<svg class="chart" viewBox="0 0 ${width} ${height}" role="img">` +
    `<line x1="0" y1="${baseline}" x2="${width}" y2="${baseline}" stroke="#888"></line>` +
    parts.join("") +
    `</svg>`
  );
}

export function pieChart(entries: DistributionEntry[], size = 260): string {
  const total = entries.reduce((acc, e) => acc + e.affiliate_total, 0);
  if (!entries.length || total <= 0) return `<svg class="chart" viewBox="0 0 ${size} ${size}"></svg>`;
  const cx = size / 2;
  const cy = size / 2;
  const r = size / 2 - 8;
  let angle = -Math.PI / 2;
  const slices = entries.map((entry, i) => {
    const span = (entry.affiliate_total / total) * 2 * Math.PI;
    const x1 = cx + r * Math.cos(angle);
    const y1 = cy + r * Math.sin(angle);
    angle += span;
    const x2 = cx + r * Math.cos(angle);
    const y2 = cy + r * Math.sin(angle);
    const large = span > Math.PI ? 1 : 0;
    const color = PALETTE[i % PALETTE.length];
    if (entries.length === 1) {
      return `<circle data-level="${escapeHtml(entry.level)}" cx="${cx}" cy="${cy}" r="${r}" fill="${color}"></circle>`;
    }
    return (
      `<path data-level="${escapeHtml(entry.level)}" fill="${color}"` +
      ` d="M${cx},${cy} L${x1.toFixed(2)},${y1.toFixed(2)}` +
      ` A${r},${r} 0 ${large} 1 ${x2.toFixed(2)},${y2.toFixed(2)} Z"></path>`
    );
  });
  const legend = entries
    .map(
      (entry, i) =>
        `<li><span class="swatch" style="background:${PALETTE[i % PALETTE.length]}"></span>` +
        `${escapeHtml(entry.level)}: <b>${entry.affiliate_total}</b> affiliates, ${entry.record_count} records</li>`,
    )
    .join("");
  return (
    `<div class="pie-wrap"><svg class="chart" viewBox="0 0 ${size} ${size}" role="img">${slices.join("")}</svg>` +
    `<ul class="legend">${legend}</ul></div>`
  );
}

export function densityCurve(doc: DensityDoc, width = 620, height = 240): string {
  const { grid, density } = doc;
  if (grid.length < 2) return `<svg class="chart" viewBox="0 0 ${width} ${height}"></svg>`;
  const xMin = grid[0];
  const xMax = grid[grid.length - 1];
  const yMax = Math.max(...density, Number.MIN_VALUE);
  const plotH = height - 30;
  const points = grid
    .map((g, i) => {
      const x = ((g - xMin) / (xMax - xMin)) * width;
      const y = plotH - (density[i] / yMax) * (plotH - 10);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  return (
    `<svg class="chart" viewBox="0 0 ${width} ${height}" role="img">` +
    `<polyline fill="none" stroke="#4574a8" stroke-width="2" points="${points}"></polyline>` +
    `<line x1="0" y1="${plotH}" x2="${width}" y2="${plotH}" stroke="#888"></line>` +
    `<text x="4" y="${height - 4}">${grid[0]}</text>` +
    `<text x="${width - 4}" y="${height - 4}" text-anchor="end">${grid[grid.length - 1]}</text>` +
    `</svg>`
  );
}

function correlationColor(value: number): string {
  // -1 -> blue, 0 -> white, +1 -> red
  const clamped = Math.max(-1, Math.min(1, value));
  const intensity = Math.round(Math.abs(clamped) * 160);
  return clamped >= 0
    ? `rgb(255,${255 - intensity},${255 - intensity})`
    : `rgb(${255 - intensity},${255 - intensity},255)`;
}

export function correlationHeatmap(doc: CorrelationDoc, cell = 56): string {
  const n = doc.labels.length;
  const margin = 150;
  const size = margin + n * cell;
  const cells: string[] = [];
  for (let i = 0; i < n; i++) {
    cells.push(
      `<text x="${margin - 6}" y="${margin + i * cell + cell / 2 + 4}" text-anchor="end" class="heat-label">` +
        `${escapeHtml(shorten(doc.labels[i]))}</text>`,
      `<text x="${margin + i * cell + cell / 2}" y="${margin - 8}" text-anchor="start" class="heat-label"` +
        ` transform="rotate(-45 ${margin + i * cell + cell / 2} ${margin - 8})">${escapeHtml(shorten(doc.labels[i]))}</text>`,
    );
    for (let j = 0; j < n; j++) {
      const value = doc.matrix[i][j];
      const fill = value === null ? "#ddd" : correlationColor(value);
      const text = value === null ? "n/a" : value.toFixed(2);
      cells.push(
        `<rect data-cell="${i}-${j}" x="${margin + j * cell}" y="${margin + i * cell}"` +
          ` width="${cell - 2}" height="${cell - 2}" fill="${fill}"></rect>`,
        `<text x="${margin + j * cell + cell / 2 - 1}" y="${margin + i * cell + cell / 2 + 3}"` +
          ` text-anchor="middle" class="heat-value">${text}</text>`,
      );
    }
  }
  return `<svg class="chart heatmap" viewBox="0 0 ${size} ${size}" role="img">${cells.join("")}</svg>`;
}

export function scatterProjection(doc: ScatterDoc, width = 620, height = 420): string {
  if (!doc.points.length) return `<svg class="chart" viewBox="0 0 ${width} ${height}"></svg>`;
  const mins = [0, 1, 2].map((k) => Math.min(...doc.points.map((p) => p[k])));
  const maxs = [0, 1, 2].map((k) => Math.max(...doc.points.map((p) => p[k])));
  const span = (k: number) => (maxs[k] - mins[k]) || 1;
  const norm = (v: number, k: number) => (v - mins[k]) / span(k);
  // oblique projection: the y axis recedes at 40%
  const project = (x: number, y: number, z: number): [number, number] => {
    const nx = norm(x, 0);
    const ny = norm(y, 1);
    const nz = norm(z, 2);
    const px = 50 + (nx + 0.4 * ny) * ((width - 90) / 1.4);
    const py = height - 50 - (nz + 0.4 * ny) * ((height - 90) / 1.4);
    return [px, py];
  };
  const dots = doc.points
    .map((p) => {
      const [px, py] = project(p[0], p[1], p[2]);
      return `<circle class="scatter-dot" cx="${px.toFixed(1)}" cy="${py.toFixed(1)}" r="2.4"></circle>`;
    })
    .join("");
  let planePolygon = "";
  const a = doc.plane["intercept"];
  const bx = doc.plane[doc.x];
  const by = doc.plane[doc.y];
  if (a !== null && a !== undefined && bx !== null && bx !== undefined && by !== null && by !== undefined) {
    const corners: [number, number][] = [
      [mins[0], mins[1]],
      [maxs[0], mins[1]],
      [maxs[0], maxs[1]],
      [mins[0], maxs[1]],
    ];
    const path = corners
      .map(([x, y]) => project(x, y, a + bx * x + by * y).map((v) => v.toFixed(1)).join(","))
      .join(" ");
    planePolygon = `<polygon class="scatter-plane" points="${path}"></polygon>`;
  }
  const axes =
    `<text x="${width / 2}" y="${height - 8}" text-anchor="middle">${escapeHtml(doc.x)}</text>` +
    `<text x="12" y="${height / 2}" transform="rotate(-90 12 ${height / 2})" text-anchor="middle">${escapeHtml(doc.z)}</text>` +
    `<text x="${width - 14}" y="26" text-anchor="end">${escapeHtml(doc.y)} →</text>`;
  return `<svg class="chart" viewBox="0 0 ${width} ${height}" role="img">${planePolygon}${dots}${axes}</svg>`;
}

// Peru bounding box for the equirectangular mini-map
const MAP_LAT = { min: -18.6, max: -2.8 };
const MAP_LON = { min: -81.8, max: -68.2 };

export function regionMap(doc: RegionsDoc, width = 460, height = 520): string {
  const located = doc.regions.filter((r) => r.lat !== null && r.lon !== null);
  const maxTotal = Math.max(...located.map((r) => r.total_affiliates), 1);
  const px = (lon: number) => ((lon - MAP_LON.min) / (MAP_LON.max - MAP_LON.min)) * (width - 40) + 20;
  const py = (lat: number) => ((MAP_LAT.max - lat) / (MAP_LAT.max - MAP_LAT.min)) * (height - 40) + 20;
  const marks = located
    .map((r) => {
      const x = px(r.lon as number);
      const y = py(r.lat as number);
      const share = r.total_affiliates / maxTotal;
      const radius = 3 + 9 * Math.sqrt(share);
      const barHeight = 6 + 54 * share;
      return (
        `<g class="region-mark" data-region="${escapeHtml(r.region)}" data-action="pick-region"` +
        ` data-total="${r.total_affiliates}">` +
        `<rect x="${(x - 2.5).toFixed(1)}" y="${(y - barHeight).toFixed(1)}" width="5" height="${barHeight.toFixed(1)}"` +
        ` fill="#d1605e"></rect>` +
        `<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="${radius.toFixed(1)}" fill="#4574a8" fill-opacity="0.75"></circle>` +
        `<title>${escapeHtml(r.region)}: ${r.total_affiliates} affiliates in ${r.record_count} records</title>` +
        `</g>`
      );
    })
    .join("");
  return `<svg class="chart map" viewBox="0 0 ${width} ${height}" role="img">` +
    `<rect x="10" y="10" width="${width - 20}" height="${height - 20}" fill="#eef4f8" stroke="#b8c6d1"></rect>${marks}</svg>`;
}

function shorten(label: string, max = 18): string {
  return label.length <= max ? label : label.slice(0, max - 1) + "…";
}
