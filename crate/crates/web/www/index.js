import init, { background, solve, auditStream } from "./pkg/eplab_web.js";

const num = (id) => Number(document.getElementById(id).value);
const setup = () => ["gamma", "flux", "rho0", "e0", "w", "b"].map(num);

function linePlot(canvas, x, series) {
  const ctx = canvas.getContext("2d");
  const { width: W, height: H } = canvas;
  ctx.clearRect(0, 0, W, H);
  const pad = 30;
  const x0 = x[0], x1 = x[x.length - 1];
  series.forEach(({ data, color, label }, k) => {
    let lo = Math.min(...data), hi = Math.max(...data);
    if (hi - lo < 1e-12) { lo -= 0.5; hi += 0.5; }
    ctx.strokeStyle = color;
    ctx.beginPath();
    data.forEach((v, i) => {
      const px = pad + ((x[i] - x0) / (x1 - x0)) * (W - 2 * pad);
      const py = H - pad - ((v - lo) / (hi - lo)) * (H - 2 * pad);
      i ? ctx.lineTo(px, py) : ctx.moveTo(px, py);
    });
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.fillText(`${label} [${lo.toFixed(3)}, ${hi.toFixed(3)}]`, pad + k * 200, 14);
  });
}

function heatmap(canvas, values, nx, ny) {
  const ctx = canvas.getContext("2d");
  const { width: W, height: H } = canvas;
  const lo = Math.min(...values), hi = Math.max(...values);
  const cw = W / (nx + 1), ch = H / (ny + 1);
  for (let i = 0; i <= nx; i++) {
    for (let j = 0; j <= ny; j++) {
      const t = hi > lo ? (values[i * (ny + 1) + j] - lo) / (hi - lo) : 0.5;
      ctx.fillStyle = `hsl(${240 - 240 * t}, 80%, 50%)`;
      ctx.fillRect(i * cw, H - (j + 1) * ch, cw + 1, ch + 1);
    }
  }
  return [lo, hi];
}

function guard(out, f) {
  try { f(); } catch (e) { document.getElementById(out).textContent = `error: ${e.message ?? e}`; }
}

await init();

document.getElementById("run-bg").onclick = () => guard("bg-out", () => {
  const v = background(...setup(), 200);
  linePlot(document.getElementById("bg-plot"), v.x, [
    { data: v.rho, color: "#1f77b4", label: "ρ" },
    { data: v.e, color: "#d62728", label: "E" },
    { data: v.mach, color: "#2ca02c", label: "M" },
  ]);
  document.getElementById("bg-out").textContent =
    `max Mach ${Math.max(...v.mach).toFixed(4)}, ρ(L) ${v.rho[v.rho.length - 1].toFixed(6)}`;
});

document.getElementById("run-solve").onclick = () => guard("solve-out", () => {
  const t = performance.now();
  const v = solve(...setup(), document.getElementById("stream").checked, num("eps"), num("nx"), num("ny"));
  const [lo, hi] = heatmap(document.getElementById("mach-plot"), v.mach, v.nx, v.ny);
  const h = Array.from(v.history, (r) => r.toExponential(2)).join(" ");
  document.getElementById("solve-out").textContent =
    `${v.converged ? "converged" : "not converged"} in ${(performance.now() - t).toFixed(0)} ms\n` +
    `Mach range [${lo.toFixed(4)}, ${hi.toFixed(4)}], min margin ${v.margin.toFixed(4)}\n` +
    `updates: ${h}`;
});

document.getElementById("run-audit").onclick = () => guard("audit-out", () => {
  const [pairs, violations, minMargin] = auditStream(num("a-gamma"), num("a-lambda"), num("a-pairs"), BigInt(num("a-seed")));
  document.getElementById("audit-out").textContent =
    `${pairs} pairs, ${violations} violations, min margin along segments ${minMargin.toExponential(3)}`;
});
