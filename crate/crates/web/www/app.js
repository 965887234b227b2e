import init, { box_trace, tree_playout, triangle_reply } from "./pkg/positional_web.js";

const $ = (id) => document.getElementById(id);
const NS = "http://www.w3.org/2000/svg";

function el(name, attrs, parent) {
  const e = document.createElementNS(NS, name);
  for (const [k, v] of Object.entries(attrs)) e.setAttribute(k, v);
  if (parent) parent.appendChild(e);
  return e;
}

function circleLayout(n, size) {
  const r = size / 2 - 24;
  return Array.from({ length: n }, (_, i) => {
    const a = (2 * Math.PI * i) / n - Math.PI / 2;
    return [size / 2 + r * Math.cos(a), size / 2 + r * Math.sin(a)];
  });
}

function call(fn, ...args) {
  const v = JSON.parse(fn(...args));
  if (v.error) throw new Error(v.error);
  return v;
}

// box game: max weight per round against the running bound
function runBox() {
  const svg = $("box-plot");
  svg.innerHTML = "";
  let t;
  try {
    t = call(box_trace, +$("box-m").value, +$("box-q").value, +$("box-k").value, $("box-adv").value, 7);
  } catch (e) {
    $("box-out").textContent = e.message;
    return;
  }
  const W = +svg.getAttribute("width"), H = +svg.getAttribute("height"), pad = 30;
  const maxes = t.rounds.map((r) => Math.max(...r.weights));
  const top = Math.max(t.final_bound, ...maxes) * 1.05;
  const x = (i) => pad + ((W - 2 * pad) * i) / Math.max(1, t.rounds.length - 1);
  const y = (w) => H - pad - ((H - 2 * pad) * w) / top;
  const line = (vals, attrs) =>
    el("polyline", { points: vals.map((v, i) => `${x(i)},${y(v)}`).join(" "), fill: "none", ...attrs }, svg);
  line(t.rounds.map((r) => r.bound), { stroke: "#888", "stroke-dasharray": "4 3" });
  line(maxes, { stroke: "#1f6feb" });
  el("text", { x: pad, y: 14, "font-size": 12 }, svg).textContent = `max weight (claims) vs bound, top ${top.toFixed(2)}`;
  const verdict = t.violations === 0 ? "no violations" : `${t.violations} violations`;
  $("box-out").textContent =
    `${t.adversary}: max weight ${t.max_weight.toFixed(3)}, bound after ${t.rounds.length} rounds ${t.final_bound.toFixed(3)}, ${verdict}`;
}

// tree playout stepping
let game = null, step = 0;

function drawTree() {
  const svg = $("tree-plot");
  svg.innerHTML = "";
  if (!game) return;
  const n = game.n, pos = circleLayout(n, +svg.getAttribute("width"));
  const image = new Map();
  const edges = [];
  for (const m of game.moves.slice(0, step)) {
    for (const [a, b] of m.edges) edges.push([a, b, m.player]);
    for (const [x, v] of m.embed) image.set(v, x);
  }
  for (const [a, b, who] of edges) {
    el("line", { x1: pos[a][0], y1: pos[a][1], x2: pos[b][0], y2: pos[b][1], class: who,
                 "stroke-width": who === "maker" ? 2 : 0.7, opacity: who === "maker" ? 1 : 0.5 }, svg);
  }
  pos.forEach(([px, py], v) => {
    el("circle", { cx: px, cy: py, r: 5, fill: image.has(v) ? "#1f6feb" : "#fff", stroke: "#333" }, svg);
  });
  const last = game.moves[step - 1];
  const status = step === game.moves.length
    ? `finished: ${game.outcome}${game.forfeit ? " (" + game.forfeit + ")" : ""}, copy verified: ${game.verified}`
    : "";
  $("tree-out").textContent =
    `${game.case}, n = ${n}, move ${step}/${game.moves.length}, ${image.size} tree vertices placed\n` +
    (last ? `${last.player}: ${last.note || "(no note)"}\n` : "") + status;
}

function runTree() {
  try {
    game = call(tree_playout, $("tree-shape").value, +$("tree-n").value, $("tree-breaker").value, +$("tree-q").value, +$("tree-seed").value);
    step = 0;
  } catch (e) {
    game = null;
    $("tree-out").textContent = e.message;
  }
  drawTree();
}

// triangle delayer: the page keeps the history in play order
let tri = { n: 9, maker: [], breaker: [], pick: null, done: false };

function drawTri(info) {
  const svg = $("tri-plot");
  svg.innerHTML = "";
  const pos = circleLayout(tri.n, +svg.getAttribute("width"));
  for (const [list, cls, w] of [[tri.breaker, "breaker", 1], [tri.maker, "maker", 3]]) {
    for (const [a, b] of list) el("line", { x1: pos[a][0], y1: pos[a][1], x2: pos[b][0], y2: pos[b][1], class: cls, "stroke-width": w }, svg);
  }
  pos.forEach(([px, py], v) => {
    const c = el("circle", { cx: px, cy: py, r: 11, fill: tri.pick === v ? "#ffd33d" : "#fff", stroke: "#333" }, svg);
    c.style.cursor = "pointer";
    c.addEventListener("click", () => clickTri(v));
    el("text", { x: px - 4, y: py + 4, "font-size": 11, "pointer-events": "none" }, svg).textContent = v;
  });
  if (info) {
    const inv = info.invariant ? "holds" : "FAILS";
    let msg = `Maker edges ${tri.maker.length}; degree-3 claim ${inv}; free edges ${info.free}`;
    if (info.factor) msg += `\ntriangle factor complete with ${tri.maker.length} edges (at least ${Math.ceil((7 * tri.n) / 6)} needed)`;
    $("tri-out").textContent = msg;
  }
}

function clickTri(v) {
  if (tri.done) return;
  if (tri.pick === null) { tri.pick = v; drawTri(); return; }
  const u = tri.pick;
  tri.pick = null;
  if (u === v) { drawTri(); return; }
  try {
    const info = call(triangle_reply, tri.n, JSON.stringify(tri.maker), JSON.stringify(tri.breaker), u, v);
    tri.maker.push([Math.min(u, v), Math.max(u, v)]);
    if (info.reply) tri.breaker.push(info.reply);
    tri.done = !!info.factor || info.free === 0;
    drawTri(info);
  } catch (e) {
    $("tri-out").textContent = e.message;
    drawTri();
  }
}

function resetTri() {
  tri = { n: Math.max(3, Math.min(30, +$("tri-n").value)), maker: [], breaker: [], pick: null, done: false };
  $("tri-out").textContent = "pick two vertices";
  drawTri();
}

await init();
$("box-run").onclick = runBox;
$("tree-run").onclick = runTree;
$("tree-next").onclick = () => { if (game && step < game.moves.length) { step++; drawTree(); } };
$("tree-back").onclick = () => { if (game && step > 0) { step--; drawTree(); } };
$("tree-end").onclick = () => { if (game) { step = game.moves.length; drawTree(); } };
$("tri-reset").onclick = resetTri;
runBox();
runTree();
resetTri();
