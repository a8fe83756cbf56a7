// Expects `wasm-pack build crates/web --target web --out-dir www/pkg`.
import init, { runTrajectory, probeFit, lossGrid } from "./pkg/genlr_web.js";

const STRIDE = 4;
const VIEWS = {
  rosenbrock: { x: [-2, 2], y: [-1, 3], start: [-1.5, 2] },
  beale: { x: [-4.5, 4.5], y: [-4.5, 4.5], start: [1, 1.5] },
};

const $ = (id) => document.getElementById(id);
const map = $("map"), lossCv = $("loss"), fitCv = $("fit");
let start = null;

function view() { return VIEWS[$("problem").value]; }

function toPx([x, y]) {
  const v = view();
  return [
    ((x - v.x[0]) / (v.x[1] - v.x[0])) * map.width,
    ((v.y[1] - y) / (v.y[1] - v.y[0])) * map.height,
  ];
}

function fromPx(px, py) {
  const v = view();
  return [
    v.x[0] + (px / map.width) * (v.x[1] - v.x[0]),
    v.y[1] - (py / map.height) * (v.y[1] - v.y[0]),
  ];
}

function drawHeatmap() {
  const v = view();
  const n = 120;
  const g = lossGrid($("problem").value, v.x[0], v.x[1], v.y[0], v.y[1], n, n);
  const finite = g.filter(Number.isFinite);
  const hi = Math.max(...finite);
  const ctx = map.getContext("2d");
  const cw = map.width / n, ch = map.height / n;
  for (let j = 0; j < n; j++) {
    for (let i = 0; i < n; i++) {
      const t = Math.min(1, g[j * n + i] / hi);
      const c = Math.round(255 * (1 - t));
      ctx.fillStyle = `rgb(${c},${Math.round(c * 0.9 + 20)},255)`;
      ctx.fillRect(i * cw, j * ch, cw + 1, ch + 1);
    }
  }
}

function drawPath(ctx, traj, colour) {
  ctx.strokeStyle = colour;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  for (let k = 0; k < traj.length; k += STRIDE) {
    const [px, py] = toPx([traj[k], traj[k + 1]]);
    k === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
  }
  ctx.stroke();
}

function drawLosses(runs) {
  const ctx = lossCv.getContext("2d");
  ctx.clearRect(0, 0, lossCv.width, lossCv.height);
  const logs = runs.map(([t]) => {
    const out = [];
    for (let k = 2; k < t.length; k += STRIDE) out.push(Math.log10(Math.max(t[k], 1e-32)));
    return out;
  });
  const all = logs.flat();
  const lo = Math.min(...all), hi = Math.max(...all);
  const len = Math.max(...logs.map((l) => l.length));
  logs.forEach((l, r) => {
    ctx.strokeStyle = runs[r][1];
    ctx.beginPath();
    l.forEach((v, i) => {
      const px = (i / Math.max(1, len - 1)) * lossCv.width;
      const py = lossCv.height - ((v - lo) / (hi - lo || 1)) * (lossCv.height - 10) - 5;
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.stroke();
  });
  ctx.fillStyle = "#000";
  ctx.fillText(`log10 loss  [${lo.toFixed(1)}, ${hi.toFixed(1)}]`, 5, 12);
}

function drawFit(p) {
  const [eta, lp, l0, lm, a, b, r2, cand, exact] = p;
  const ctx = fitCv.getContext("2d");
  ctx.clearRect(0, 0, fitCv.width, fitCv.height);
  const span = Math.max(3 * eta, Number.isFinite(cand) ? 1.5 * cand : 0);
  const xs = [], ys = [];
  for (let i = 0; i <= 100; i++) {
    const s = -eta + ((span + eta) * i) / 100;
    xs.push(s);
    ys.push(a * s * s / 2 - b * s);
  }
  const pts = [[-eta, lp - l0], [0, 0], [eta, lm - l0]];
  const yAll = ys.concat(pts.map((q) => q[1]));
  const lo = Math.min(...yAll), hi = Math.max(...yAll);
  const X = (s) => ((s + eta) / (span + eta)) * fitCv.width;
  const Y = (v) => fitCv.height - 5 - ((v - lo) / (hi - lo || 1)) * (fitCv.height - 10);
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  xs.forEach((s, i) => (i === 0 ? ctx.moveTo(X(s), Y(ys[i])) : ctx.lineTo(X(s), Y(ys[i]))));
  ctx.stroke();
  ctx.fillStyle = "#000";
  for (const [s, v] of pts) ctx.fillRect(X(s) - 3, Y(v) - 3, 6, 6);
  $("info").textContent =
    `fit along -gradient: A* = ${a.toExponential(3)}  b* = ${b.toExponential(3)}  R2 = ${r2.toFixed(4)}\n` +
    `eta from probes = ${Number.isFinite(cand) ? cand.toExponential(4) : "rejected"}\n` +
    `eta from exact Hessian = ${exact.toExponential(4)}`;
}

function refresh() {
  drawHeatmap();
  if (!start) return;
  const args = [$("problem").value, $("optimizer").value];
  const lr = Number($("lr").value), iters = Number($("iters").value);
  try {
    const base = runTrajectory(...args, "off", lr, iters, start[0], start[1]);
    const gen = runTrajectory(...args, $("mode").value, lr, iters, start[0], start[1]);
    const ctx = map.getContext("2d");
    drawPath(ctx, base, "#555");
    drawPath(ctx, gen, "#d22");
    drawLosses([[base, "#555"], [gen, "#d22"]]);
    drawFit(probeFit($("problem").value, start[0], start[1], Number($("eta").value)));
  } catch (e) {
    $("info").textContent = String(e);
  }
}

map.addEventListener("click", (ev) => {
  const r = map.getBoundingClientRect();
  start = fromPx(ev.clientX - r.left, ev.clientY - r.top);
  refresh();
});

for (const id of ["problem", "optimizer", "mode", "lr", "iters", "eta"]) {
  $(id).addEventListener("change", () => {
    if (id === "problem") start = view().start;
    refresh();
  });
}

await init();
start = view().start;
refresh();
