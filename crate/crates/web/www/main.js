import init, { wordArithmetic, subgroup, primitivity } from "./pkg/fgf_web.js";

const $ = (id) => document.getElementById(id);

function rank() {
  const n = parseInt($("rank").value, 10);
  return Number.isNaN(n) || n < 0 ? 0 : n;
}

function show(out, render) {
  out.classList.remove("error");
  try {
    out.textContent = render();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e);
  }
}

function words() {
  const r = JSON.parse(wordArithmetic($("words").value, rank()));
  const lines = [
    `rank ${r.rank}`,
    `product      ${r.product}`,
    `inverse      ${r.inverse}`,
    `cyclic core  ${r.cyclic_core}`,
  ];
  if (r.root) lines.push(`root         (${r.root[0]})^${r.root[1]}`);
  return lines.join("\n");
}

function gens() {
  const r = JSON.parse(subgroup($("gens").value, $("probe").value, rank()));
  const lines = [`rank ${r.rank}, ${r.vertices} vertices`, "basis:", ...r.basis.map((b) => "  " + b)];
  if (r.member !== null) lines.push(`probe is ${r.member ? "" : "not "}in the subgroup`);
  lines.push("", "edges:", r.dump.trimEnd());
  return lines.join("\n");
}

function prim() {
  const r = JSON.parse(primitivity($("prim").value, rank()));
  return [
    r.primitive ? "primitive" : "not primitive",
    `minimal form ${r.minimal}`,
    "witness:",
    r.witness.trimEnd(),
  ].join("\n");
}

await init();
for (const [id, f] of [["words", words], ["gens", gens], ["prim", prim]]) {
  $(`${id}-run`).addEventListener("click", () => show($(`${id}-out`), f));
  show($(`${id}-out`), f);
}
