/** DOM wiring for the studio page. All engine logic lives in state/masks. */

import { ApiClient } from "./api.js";
import { Studio } from "./state.js";
import { latentFootprint } from "./masks.js";

const LAYER_COLORS = ["#e5484d", "#30a46c", "#3e63dd", "#f5a524", "#8e4ec6"];
const SCALE = 6; // canvas pixels per engine pixel

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function main() {
  const api = new ApiClient(
    (window as unknown as { WORDCRAFT_API?: string }).WORDCRAFT_API ?? "http://127.0.0.1:8787",
  );
  const studio = new Studio(api, { canvasSize: 64 });

  const canvas = el<HTMLCanvasElement>("canvas");
  const ctx = canvas.getContext("2d")!;
  canvas.width = studio.masks.width * SCALE;
  canvas.height = studio.masks.height * SCALE;

  const queryBox = el<HTMLTextAreaElement>("query");
  const useLlm = el<HTMLInputElement>("use-llm");
  const transparent = el<HTMLInputElement>("transparent");
  const brushRadius = el<HTMLInputElement>("brush-radius");
  const eraseToggle = el<HTMLInputElement>("erase");
  const status = el<HTMLDivElement>("status");
  const layersBox = el<HTMLDivElement>("layers");
  const strip = el<HTMLDivElement>("history");
  const resultImg = el<HTMLImageElement>("result");

  let activeLayer = 0;
  let glyphImage: HTMLImageElement | null = null;
  let drawing = false;

  const say = (text: string, isError = false) => {
    status.textContent = text;
    status.className = isError ? "error" : "";
  };

  const redraw = () => {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (glyphImage) {
      ctx.imageSmoothingEnabled = false;
      ctx.globalAlpha = 0.9;
      ctx.drawImage(glyphImage, 0, 0, canvas.width, canvas.height);
      ctx.globalAlpha = 1.0;
    }
    const { width, height } = studio.masks;
    for (const [i, layer] of studio.masks.layers.entries()) {
      ctx.fillStyle = LAYER_COLORS[i % LAYER_COLORS.length] + "80";
      for (let y = 0; y < height; y++) {
        for (let x = 0; x < width; x++) {
          if (layer.mask[y * width + x]) {
            ctx.fillRect(x * SCALE, y * SCALE, SCALE, SCALE);
          }
        }
      }
      // latent footprint preview: the cells the engine will actually bind
      const grid = 8;
      const cells = latentFootprint(layer.mask, width, height, grid, grid);
      ctx.strokeStyle = LAYER_COLORS[i % LAYER_COLORS.length];
      ctx.lineWidth = 2;
      const cw = canvas.width / grid;
      for (let r = 0; r < grid; r++) {
        for (let c = 0; c < grid; c++) {
          if (cells[r * grid + c]) ctx.strokeRect(c * cw, r * cw, cw, cw);
        }
      }
    }
  };

  const renderLayers = () => {
    layersBox.innerHTML = "";
    for (const [i, layer] of studio.masks.layers.entries()) {
      const row = document.createElement("div");
      row.className = "layer" + (i === activeLayer ? " active" : "");
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.background = LAYER_COLORS[i % LAYER_COLORS.length];
      const prompt = document.createElement("input");
      prompt.value = layer.prompt;
      prompt.placeholder = `region ${layer.id} prompt (e.g. stripes red)`;
      prompt.addEventListener("input", () => (layer.prompt = prompt.value));
      row.addEventListener("click", () => {
        activeLayer = i;
        renderLayers();
      });
      row.append(swatch, prompt);
      layersBox.append(row);
    }
  };

  const renderHistory = () => {
    strip.innerHTML = "";
    for (const entry of studio.history) {
      const thumb = document.createElement("img");
      thumb.src = api.imageUrl(studio.sessionId!, entry.index);
      thumb.title = `#${entry.index} ${entry.op} seed=${entry.params.seed}`;
      thumb.className = entry.index === studio.selectedIndex ? "selected" : "";
      thumb.addEventListener("click", () => {
        studio.select(entry.index);
        resultImg.src = thumb.src;
        renderHistory();
      });
      strip.append(thumb);
    }
    const url = studio.selectedImageUrl();
    if (url) resultImg.src = url;
  };

  const canvasPos = (ev: MouseEvent) => {
    const rect = canvas.getBoundingClientRect();
    return {
      x: ((ev.clientX - rect.left) / rect.width) * studio.masks.width,
      y: ((ev.clientY - rect.top) / rect.height) * studio.masks.height,
    };
  };

  canvas.addEventListener("mousedown", (ev) => {
    if (!studio.masks.layers.length) return;
    drawing = true;
    const p = canvasPos(ev);
    studio.masks.brushRegion(studio.masks.layers[activeLayer].id, {
      points: [p],
      radius: parseFloat(brushRadius.value),
      erase: eraseToggle.checked,
    });
    redraw();
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (!drawing || !studio.masks.layers.length) return;
    const p = canvasPos(ev);
    studio.masks.brushRegion(studio.masks.layers[activeLayer].id, {
      points: [p],
      radius: parseFloat(brushRadius.value),
      erase: eraseToggle.checked,
    });
    redraw();
  });
  window.addEventListener("mouseup", () => (drawing = false));

  el<HTMLButtonElement>("add-layer").addEventListener("click", () => {
    studio.masks.addLayer(LAYER_COLORS[studio.masks.layers.length % LAYER_COLORS.length]);
    activeLayer = studio.masks.layers.length - 1;
    renderLayers();
  });

  el<HTMLButtonElement>("open").addEventListener("click", async () => {
    try {
      studio.options.useLlm = useLlm.checked;
      say("parsing request and preparing the glyph...");
      const session = await studio.openSession(queryBox.value);
      glyphImage = new Image();
      glyphImage.onload = redraw;
      glyphImage.src = api.artifactUrl(session.artifacts.glyph_png);
      say(`session ${session.id.slice(0, 8)} ready (${session.bundle.task})`);
      renderHistory();
    } catch (err) {
      say(String(err), true);
    }
  });

  const runOp = async (op: () => Promise<unknown>, label: string) => {
    try {
      studio.options.transparent = transparent.checked;
      say(`${label}...`);
      await op();
      renderHistory();
      say(`${label} done (history #${studio.selectedIndex})`);
    } catch (err) {
      say(String(err), true);
    }
  };

  el<HTMLButtonElement>("start").addEventListener("click", () =>
    runOp(() => studio.start(), "Start"),
  );
  el<HTMLButtonElement>("refresh").addEventListener("click", () =>
    runOp(() => studio.refresh(), "Refresh"),
  );
  el<HTMLButtonElement>("continue").addEventListener("click", () =>
    runOp(() => studio.continueEdit(), "Continue"),
  );

  studio.masks.addLayer(LAYER_COLORS[0]);
  renderLayers();
  redraw();
}

main();
