import init, { bandsDos, lyapunovScan, walkEvolution } from "./pkg/cmv_spectra_web.js";

const $ = (id) => document.getElementById(id);
const TAU = 2 * Math.PI;

// Small deterministic generator so a seed reproduces a word.
function mulberry32(a) {
  return () => {
    a |= 0; a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function randomWord(q, rmax, seed) {
  const rnd = mulberry32(seed);
  const pairs = [];
  for (let i = 0; i < q; i++) {
    const r = rmax * Math.sqrt(rnd()), a = TAU * rnd();
    pairs.push({ alpha: [r * Math.cos(a), r * Math.sin(a)], lambda_arg: Math.PI * (2 * rnd() - 1) });
  }
  return { q, r: Math.max(rmax, 0.5), pairs };
}

function setWord(w) { $("word").value = JSON.stringify(w, null, 1); }

function plot(canvas, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { width: W, height: H } = canvas;
  ctx.clearRect(0, 0, W, H);
  const xs = series.flatMap((s) => s.x), ys = series.flatMap((s) => s.y).filter(Number.isFinite);
  const x0 = opts.xmin ?? Math.min(...xs), x1 = opts.xmax ?? Math.max(...xs);
  const y0 = opts.ymin ?? Math.min(...ys), y1 = opts.ymax ?? Math.max(...ys);
  const px = (x) => 30 + ((x - x0) / (x1 - x0 || 1)) * (W - 40);
  const py = (y) => H - 20 - ((y - y0) / (y1 - y0 || 1)) * (H - 30);
  for (const [a, b] of opts.shade ?? []) {
    ctx.fillStyle = "#e8eef8";
    const l = px(a), r = px(Math.min(b, x1));
    ctx.fillRect(l, 10, r - l, H - 30);
    if (b > x1) ctx.fillRect(px(x0), 10, px(b - TAU) - px(x0), H - 30);
  }
  for (const y of opts.hlines ?? []) {
    ctx.strokeStyle = "#bbb"; ctx.beginPath(); ctx.moveTo(px(x0), py(y)); ctx.lineTo(px(x1), py(y)); ctx.stroke();
  }
  for (const s of series) {
    ctx.strokeStyle = s.color; ctx.lineWidth = 1.3; ctx.beginPath();
    let pen = false;
    s.x.forEach((x, i) => {
      const y = Math.min(Math.max(s.y[i], y0), y1);
      if (!Number.isFinite(s.y[i])) { pen = false; return; }
      pen ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y));
      pen = true;
    });
    ctx.stroke();
  }
  ctx.fillStyle = "#555"; ctx.font = "11px sans-serif";
  ctx.fillText(y1.toPrecision(3), 2, 14); ctx.fillText(y0.toPrecision(3), 2, H - 22);
  ctx.fillText(x0.toPrecision(3), 30, H - 5); ctx.fillText(x1.toPrecision(3), W - 50, H - 5);
}

function guard(errEl, f) {
  try { errEl.textContent = ""; f(); } catch (e) { errEl.textContent = String(e); }
}

function runDos() {
  guard($("word-err"), () => {
    const d = JSON.parse(bandsDos($("word").value, 2048));
    const cap = 4 * Math.max(...d.lower_bound);
    $("dos-info").textContent = `q = ${d.q}, ${d.bands.length} bands, Leb = ${d.measure.toPrecision(6)}`;
    plot($("dos"), [
      { x: d.tau, y: d.lower_bound, color: "#9ab" },
      { x: d.tau, y: d.density, color: "#123" },
    ], { xmin: 0, xmax: TAU, ymin: 0, ymax: cap, shade: d.bands });
  });
}

function runLyap() {
  guard($("word-err"), () => {
    const d = JSON.parse(lyapunovScan($("word").value, 2048));
    plot($("lyap"), [
      { x: d.tau, y: d.discriminant, color: "#123" },
      { x: d.tau, y: d.lyapunov, color: "#c33" },
    ], { xmin: 0, xmax: TAU, ymin: -4, ymax: 4, hlines: [-2, 0, 2] });
  });
}

function coinFile() {
  const s = Math.SQRT1_2, t = Number($("theta").value);
  const rot = [[Math.cos(t), 0], [-Math.sin(t), 0], [Math.sin(t), 0], [Math.cos(t), 0]];
  const coins = {
    hadamard: [[[s, 0], [s, 0], [s, 0], [-s, 0]]],
    rotation: [rot],
    alternating: [[[s, 0], [s, 0], [s, 0], [-s, 0]], rot],
    shift: [[[1, 0], [0, 0], [0, 0], [1, 0]]],
  }[$("coins").value];
  return JSON.stringify({ period: coins.length, coins });
}

function runWalk() {
  const steps = Number($("steps").value);
  $("steps-v").textContent = steps;
  guard($("walk-err"), () => {
    const d = JSON.parse(walkEvolution(coinFile(), steps, Number($("jwin").value)));
    plot($("walk"), [{ x: d.positions, y: d.probability, color: "#123" }], { ymin: 0 });
    const n = d.survival.map((_, i) => i);
    plot($("surv"), [
      { x: n, y: d.survival, color: "#123" },
      { x: n, y: d.cesaro, color: "#c33" },
    ], { ymin: 0, ymax: 1 });
  });
}

await init();
const fresh = () => setWord(randomWord(Number($("q").value), Number($("rmax").value), Number($("seed").value)));
$("random").onclick = () => { fresh(); runDos(); runLyap(); };
$("half").onclick = () => {
  setWord({ q: 2, pairs: [{ alpha: [0.5, 0], lambda_arg: 0 }, { alpha: [0.5, 0], lambda_arg: 0 }] });
  runDos(); runLyap();
};
$("run-dos").onclick = runDos;
$("run-lyap").onclick = runLyap;
for (const id of ["coins", "theta", "steps", "jwin"]) $(id).oninput = runWalk;
fresh(); runDos(); runLyap(); runWalk();
