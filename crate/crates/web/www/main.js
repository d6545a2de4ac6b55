import init, { hopf_helicity, twist_suspension, furstenberg_orbit, golden_theta } from "./pkg/helicity_web.js";

const $ = (id) => document.getElementById(id);

function show(id, text) {
  const v = JSON.parse(text);
  $(id).textContent = v.error ? `${v.error}: ${v.message}` : JSON.stringify(v, null, 2);
}

function drawOrbit(points) {
  const c = $("orbit-canvas");
  const ctx = c.getContext("2d");
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, c.width, c.height);
  ctx.fillStyle = "rgba(20, 60, 160, 0.5)";
  for (let i = 0; i + 1 < points.length; i += 2) {
    ctx.fillRect(points[i] * c.width, (1 - points[i + 1]) * c.height, 1, 1);
  }
}

await init();
$("status").textContent = "Ready.";
$("orbit-theta").value = golden_theta().toFixed(10);

$("hopf-run").onclick = () =>
  show("hopf-out", hopf_helicity($("hopf-expr").value, Number($("hopf-n").value), $("hopf-direct").checked));

$("twist-run").onclick = () =>
  show(
    "twist-out",
    twist_suspension(
      $("twist-expr").value,
      Number($("twist-support").value),
      Number($("twist-n").value),
      $("twist-ham").checked,
    ),
  );

$("orbit-run").onclick = () => {
  const n = Number($("orbit-n").value);
  const out = furstenberg_orbit(Number($("orbit-theta").value), BigInt($("orbit-d").value), Number($("orbit-a").value), n);
  if (out.length === 0) {
    $("orbit-out").textContent = "invalid input";
    return;
  }
  const disc = out[out.length - 1];
  $("orbit-out").textContent = `${n} points, 8x8 discrepancy ${Number.isNaN(disc) ? "n/a (need 64 points)" : disc.toExponential(3)}`;
  drawOrbit(out.subarray(0, out.length - 1));
};
