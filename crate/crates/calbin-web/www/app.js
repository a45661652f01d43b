// Demo page wiring: read controls, call the wasm endpoints, draw on canvas.
// No framework, no dependencies.

import init, { scan_report, reliability, expected_curves, version } from "./pkg/calbin_web.js";

const $ = (id) => document.getElementById(id);

// ---- tiny canvas plot helper -------------------------------------------

function plot(canvas, { xlim, ylim, xlabel, ylabel }) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const m = { l: 58, r: 14, t: 10, b: 38 };
  ctx.clearRect(0, 0, W, H);

  const px = (x) => m.l + ((x - xlim[0]) / (xlim[1] - xlim[0])) * (W - m.l - m.r);
  const py = (y) => H - m.b - ((y - ylim[0]) / (ylim[1] - ylim[0])) * (H - m.t - m.b);

  // frame + ticks
  ctx.strokeStyle = "#c8d1db";
  ctx.fillStyle = "#5c6b7a";
  ctx.lineWidth = 1;
  ctx.font = "12px system-ui";
  ctx.strokeRect(m.l, m.t, W - m.l - m.r, H - m.t - m.b);
  const ticks = (lo, hi, n) => {
    const span = hi - lo;
    const step = Math.pow(10, Math.floor(Math.log10(span / n)));
    const mult = [5, 2, 1].find((k) => span / (step * k) >= n - 1) || 1;
    const s = step * mult;
    const out = [];
    for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12; v += s) out.push(v);
    return out;
  };
  ctx.textAlign = "center";
  for (const x of ticks(xlim[0], xlim[1], 6)) {
    ctx.beginPath(); ctx.moveTo(px(x), H - m.b); ctx.lineTo(px(x), H - m.b + 4); ctx.stroke();
    ctx.fillText(x.toPrecision(3).replace(/\.?0+$/, ""), px(x), H - m.b + 16);
  }
  ctx.textAlign = "right";
  for (const y of ticks(ylim[0], ylim[1], 5)) {
    ctx.beginPath(); ctx.moveTo(m.l - 4, py(y)); ctx.lineTo(m.l, py(y)); ctx.stroke();
    ctx.fillText(y.toPrecision(3), m.l - 7, py(y) + 4);
  }
  ctx.textAlign = "center";
  ctx.fillText(xlabel, m.l + (W - m.l - m.r) / 2, H - 6);
  ctx.save();
  ctx.translate(14, m.t + (H - m.t - m.b) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();

  return {
    ctx, px, py,
    points(data, color, r = 3) {
      ctx.fillStyle = color;
      for (const [x, y] of data) {
        ctx.beginPath(); ctx.arc(px(x), py(y), r, 0, 2 * Math.PI); ctx.fill();
      }
    },
    line(data, color, dash = []) {
      ctx.strokeStyle = color;
      ctx.setLineDash(dash);
      ctx.lineWidth = 1.6;
      ctx.beginPath();
      data.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.lineWidth = 1;
    },
    vbar(x, y0, y1, color) {
      ctx.strokeStyle = color;
      ctx.lineWidth = 2.5;
      ctx.beginPath(); ctx.moveTo(px(x), py(y0)); ctx.lineTo(px(x), py(y1)); ctx.stroke();
      ctx.lineWidth = 1;
    },
    label(x, y, text, color) {
      ctx.fillStyle = color;
      ctx.textAlign = "left";
      ctx.fillText(text, px(x) + 4, py(y) + 4);
    },
  };
}

function bounds(values, padFrac = 0.08, includeZero = false) {
  let lo = Math.min(...values), hi = Math.max(...values);
  if (includeZero) lo = Math.min(lo, 0);
  const pad = (hi - lo || 1) * padFrac;
  return [lo - pad, hi + pad];
}

// ---- panels --------------------------------------------------------------

function drawScan(canvasId, verdictId, section, target) {
  const { series, fit } = section;
  const pts = series.points.map((p) => [p.sqrt_n, p.value]);
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]).concat([fit.intercept_ci[0], fit.intercept_ci[1], target]);
  const xlim = [0, Math.max(...xs) * 1.05];
  const p = plot($(canvasId), {
    xlim,
    ylim: bounds(ys),
    xlabel: "sqrt(N)",
    ylabel: series.metric,
  });
  p.line([[xlim[0], target], [xlim[1], target]], "#9aa7b4", [5, 4]);
  p.line(
    [[0, fit.intercept], [xlim[1], fit.intercept + fit.slope * xlim[1]]],
    "#dc2626"
  );
  p.points(pts, "#2563eb");
  p.vbar(0, fit.intercept_ci[0], fit.intercept_ci[1], "#dc2626");

  const ok = fit.calibrated;
  $(verdictId).innerHTML =
    `intercept <b>${fit.intercept.toFixed(4)}</b>` +
    ` (95% CI ${fit.intercept_ci[0].toFixed(4)} … ${fit.intercept_ci[1].toFixed(4)}),` +
    ` slope ${fit.slope.toFixed(5)} per sqrt(N) &mdash; ` +
    (ok
      ? `<b class="ok">consistent with calibration</b>`
      : `<b class="bad">miscalibrated</b>, residual error ${(fit.residual_error).toFixed(3)}`);
}

function drawDiagram(data) {
  const pts = data.points.map((q) => [q.rmv, q.rmse]);
  const all = pts.flat();
  const lim = bounds(all, 0.1);
  const p = plot($("diagram"), { xlim: lim, ylim: lim, xlabel: "RMV", ylabel: "RMSE" });
  p.line([[lim[0], lim[0]], [lim[1], lim[1]]], "#9aa7b4", [5, 4]);
  p.points(pts, "#2563eb", 4);
  const enceText = data.ence === null ? "n/a" : (100 * data.ence).toFixed(2) + "%";
  const zveText = data.zve === null ? "n/a" : data.zve.toFixed(4);
  $("diagramStats").innerHTML =
    `at N = ${data.bins}: ENCE <b>${enceText}</b>, ZVE <b>${zveText}</b> ` +
    `<span style="color:#5c6b7a">(single-N values depend on the binning choice; see the fits)</span>`;
}

function drawCurves(rows) {
  const byFactor = new Map();
  for (const r of rows) {
    if (!byFactor.has(r.factor)) byFactor.set(r.factor, []);
    byFactor.get(r.factor).push([r.sqrt_n, r.value]);
  }
  const xs = rows.map((r) => r.sqrt_n);
  const ys = rows.map((r) => r.value);
  const xlim = [0, Math.max(...xs) * 1.12];
  const p = plot($("curves"), {
    xlim,
    ylim: bounds(ys, 0.08, true),
    xlabel: "sqrt(N)",
    ylabel: "expected ENCE",
  });
  const palette = ["#2563eb", "#0891b2", "#059669", "#ca8a04", "#ea580c", "#dc2626"];
  let i = 0;
  for (const [factor, pts] of byFactor) {
    pts.sort((a, b) => a[0] - b[0]);
    const color = palette[i++ % palette.length];
    p.line(pts, color);
    const last = pts[pts.length - 1];
    p.label(last[0], last[1], factor.toFixed(2), color);
  }
}

// ---- wiring ---------------------------------------------------------------

let busy = false;

async function refresh() {
  if (busy) return;
  busy = true;
  const status = $("status");
  try {
    const m = parseInt($("m").value, 10);
    const factor = parseFloat($("factor").value);
    const seed = parseInt($("seed").value, 10) || 0;
    const threshold = parseFloat($("threshold").value) || 0;
    const bins = parseInt($("bins").value, 10) || 15;
    $("factorValue").textContent = factor.toFixed(2);
    status.textContent = "computing…";
    await new Promise((r) => setTimeout(r, 0)); // let the status paint

    const report = JSON.parse(
      scan_report(JSON.stringify({ m, factor, seed, fit_threshold: threshold }))
    );
    drawScan("scanEnce", "verdictEnce", report.ence, 0);
    drawScan("scanZve", "verdictZve", report.zve, 1);

    const diagram = JSON.parse(
      reliability(JSON.stringify({ m, factor, seed, bins: Math.min(bins, m) }))
    );
    drawDiagram(diagram);

    const curves = JSON.parse(
      expected_curves(JSON.stringify({ m, factors: [1.0, 1.05, 1.1, 1.15, 1.2, 1.25] }))
    );
    drawCurves(curves);

    status.textContent = `calbin-web ${version()} — M=${m}, factor=${factor.toFixed(2)}, seed=${seed}`;
  } catch (err) {
    status.textContent = `error: ${err}`;
  } finally {
    busy = false;
  }
}

await init();
for (const id of ["m", "factor", "seed", "threshold", "bins"]) {
  $(id).addEventListener("change", refresh);
}
$("factor").addEventListener("input", () => {
  $("factorValue").textContent = parseFloat($("factor").value).toFixed(2);
});
await refresh();
