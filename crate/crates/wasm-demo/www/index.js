import init, { ratioCurves, lotteryView, deterministicRatioCurve } from "./pkg/robust_pricing_wasm.js";

const COLORS = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// Draws polylines of (x, y) pairs; points with y outside [y0, y1] break the line.
function plot(canvas, series, { x0, x1, y0, y1, xlabel, marks = [] }) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 45;
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (W - 2 * pad);
  const sy = (y) => H - pad - ((y - y0) / (y1 - y0)) * (H - 2 * pad);
  ctx.clearRect(0, 0, W, H);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, pad); ctx.lineTo(pad, H - pad); ctx.lineTo(W - pad, H - pad);
  ctx.stroke();
  for (let i = 0; i <= 5; i++) {
    const x = x0 + ((x1 - x0) * i) / 5, y = y0 + ((y1 - y0) * i) / 5;
    ctx.fillText(x.toFixed(2), sx(x) - 12, H - pad + 16);
    ctx.fillText(y.toFixed(2), 4, sy(y) + 4);
  }
  ctx.fillText(xlabel, W - pad - 20, H - 8);
  series.forEach(({ points, color }) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let pen = false;
    for (const [x, y] of points) {
      if (!Number.isFinite(y) || y > y1 || y < y0) { pen = false; continue; }
      if (pen) ctx.lineTo(sx(x), sy(y)); else ctx.moveTo(sx(x), sy(y));
      pen = true;
    }
    ctx.stroke();
  });
  for (const { x, color } of marks) {
    ctx.strokeStyle = color;
    ctx.setLineDash([4, 4]);
    ctx.beginPath(); ctx.moveTo(sx(x), pad); ctx.lineTo(sx(x), H - pad); ctx.stroke();
    ctx.setLineDash([]);
  }
}

const pairs = (flat, stride, col) => {
  const out = [];
  for (let i = 0; i < flat.length; i += stride) out.push([flat[i], flat[i + col]]);
  return out;
};

function guarded(errId, fn) {
  try { fn(); $(errId).textContent = ""; } catch (e) { $(errId).textContent = String(e.message ?? e); }
}

function drawCurves() {
  guarded("c-err", () => {
    const rmax = num("c-rmax");
    const rows = ratioCurves(rmax, rmax / 400);
    const names = ["1 + ln(1 + r^2)", "log-lottery", "best posted price", "Azar-Micali"];
    const series = names.map((_, k) => ({ points: pairs(rows, 5, k + 1), color: COLORS[k] }));
    const top = Math.max(...pairs(rows, 5, 3).map(([, y]) => y));
    plot($("c-canvas"), series, { x0: 0, x1: rmax, y0: 1, y1: Math.min(top, 50), xlabel: "r" });
    $("c-legend").innerHTML = names.map((n, k) => `<span style="color:${COLORS[k]}">${n}</span>`).join("");
  });
}

function drawLottery() {
  guarded("l-err", () => {
    const v = lotteryView(num("l-mu"), num("l-sigma"), 300);
    const rows = [
      ["price range", `[${v.pi1.toFixed(5)}, ${v.pi2.toFixed(5)}]`],
      ["guaranteed ratio", v.ratio.toFixed(5)],
      ["ratio against the hard mixture", v.mixtureRatio.toFixed(5)],
      ["lower bound for any mechanism", v.lower.toFixed(5)],
      ["best posted price", `${v.detPrice.toFixed(5)} (ratio ${v.detRatio.toFixed(5)})`],
    ];
    $("l-table").innerHTML = rows.map(([k, x]) => `<tr><td>${k}</td><td>${x}</td></tr>`).join("");
    const cdf = pairs(v.cdf, 2, 1);
    const lo = Math.max(0, v.pi1 - 0.1 * (v.pi2 - v.pi1 || 1));
    const hi = v.pi2 + 0.1 * (v.pi2 - v.pi1 || 1);
    cdf.unshift([lo, 0]);
    cdf.push([hi, 1]);
    plot($("l-canvas"), [{ points: cdf, color: COLORS[1] }], { x0: lo, x1: hi, y0: 0, y1: 1, xlabel: "price" });
    v.free();
  });
}

function drawDeterministic() {
  guarded("d-err", () => {
    const mu = num("d-mu"), sigma = num("d-sigma");
    const curve = pairs(deterministicRatioCurve(mu, sigma, 600), 2, 1);
    const best = lotteryView(mu, sigma, 2);
    plot($("d-canvas"), [{ points: curve, color: COLORS[2] }], {
      x0: 0, x1: 1.2 * mu, y0: 1, y1: Math.max(num("d-ymax"), 2), xlabel: "p",
      marks: [{ x: best.detPrice, color: COLORS[0] }],
    });
    best.free();
  });
}

await init();
$("c-rmax").addEventListener("input", drawCurves);
["l-mu", "l-sigma"].forEach((id) => $(id).addEventListener("input", drawLottery));
["d-mu", "d-sigma", "d-ymax"].forEach((id) => $(id).addEventListener("input", drawDeterministic));
drawCurves();
drawLottery();
drawDeterministic();
