/** Browser bootstrap: builds the page and wires the controller to the DOM. */

import { ServiceClient } from "./api.js";
import { ViewerController } from "./controller.js";
import { FaceGrid } from "./faceGrid.js";
import { Schematic } from "./schematic.js";
import { DEFAULT_SCREEN, SCALE_PRESETS, type Kind, type Mode } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const client = new ServiceClient(params.get("api") ?? "");

  const frame = el<HTMLImageElement>("frame");
  const badge = el<HTMLElement>("pass-badge");
  const timing = el<HTMLElement>("timing");
  const banner = el<HTMLElement>("error-banner");
  const grid = new FaceGrid(el("face-grid"));
  let objectUrl: string | null = null;

  const controller = new ViewerController(client, {
    onFrame: (blob, state) => {
      if (objectUrl) URL.revokeObjectURL(objectUrl);
      objectUrl = URL.createObjectURL(blob);
      frame.src = objectUrl;
      badge.textContent = `passes: ${state.passCount}`;
      timing.textContent = `${state.renderMs?.toFixed(0)} ms`;
    },
    onFaces: (faces, count) => grid.update(faces, count),
    onState: (state) => {
      banner.hidden = state.error === null;
      if (state.error !== null) banner.textContent = state.error;
      schematic.setHead(state.head.x, state.head.z);
    },
  });

  const schematic = new Schematic(
    el<HTMLCanvasElement>("schematic"),
    DEFAULT_SCREEN,
    controller.state.ipd,
  );
  schematic.onHeadMove = (x, z, dragging) => controller.moveHead(x, z, dragging);

  const sceneSelect = el<HTMLSelectElement>("scene");
  client
    .scenes()
    .then((scenes) => {
      sceneSelect.replaceChildren(
        ...scenes.map((scene) => {
          const option = document.createElement("option");
          option.value = scene.id;
          option.textContent = `${scene.name} (${scene.primitive_count})`;
          return option;
        }),
      );
      sceneSelect.value = controller.state.scene;
    })
    .catch((err) => {
      banner.hidden = false;
      banner.textContent = String(err);
    });
  sceneSelect.addEventListener("change", () => controller.setScene(sceneSelect.value));

  const modeSelect = el<HTMLSelectElement>("mode");
  modeSelect.addEventListener("change", () => controller.setMode(modeSelect.value as Mode));
  const kindSelect = el<HTMLSelectElement>("kind");
  kindSelect.addEventListener("change", () => controller.setKind(kindSelect.value as Kind));

  const scaleSelect = el<HTMLSelectElement>("scale");
  scaleSelect.replaceChildren(
    ...SCALE_PRESETS.map((preset) => {
      const option = document.createElement("option");
      option.value = String(preset);
      option.textContent = `${preset}x`;
      return option;
    }),
  );
  scaleSelect.value = String(controller.state.scale);
  scaleSelect.addEventListener("change", () => controller.setScale(Number(scaleSelect.value)));

  const heightSlider = el<HTMLInputElement>("height");
  heightSlider.max = String(DEFAULT_SCREEN.height);
  heightSlider.value = String(controller.state.head.height);
  heightSlider.addEventListener("change", () => controller.setHeight(Number(heightSlider.value)));

  const ipdInput = el<HTMLInputElement>("ipd");
  ipdInput.value = String(controller.state.ipd);
  ipdInput.addEventListener("change", () => {
    controller.setIpd(Number(ipdInput.value));
    schematic.setIpd(controller.state.ipd);
  });

  controller.update();
}

boot();
