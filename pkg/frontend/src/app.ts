// Browser entry point: wires the pointer-driven wand, floating menus, the
// virtual slider, slice box, transfer-function editor, and animation
// transport to a live engine session.

import * as THREE from "three";

import { hudLines } from "./hud.js";
import { buildMenu, findNode, layoutPanels, MenuNode } from "./menu.js";
import { PanelQuad, pickPanel } from "./picking.js";
import { domainBounds, EngineClient, FieldListing, listFields, okOf } from "./protocol.js";
import { domainWireframe, objectToThree } from "./render.js";
import { placeSeed } from "./seeds.js";
import { dragLevel, releaseSlider, SliderDrag } from "./slider.js";
import { dragFraction, releaseSliceBox } from "./slicebox.js";
import { makeTf, tfParams, TfPoint } from "./tfeditor.js";
import { ParticleClock, particlePositions } from "./animate.js";
import { decodeFrame, PolylineObject } from "./vfa.js";
import { Vec3 } from "./vec.js";
import { makeWand, probePoint, WandState, withBeamScroll, withButton } from "./wand.js";

interface UiState {
  listing: FieldListing;
  wand: WandState;
  menuOpen: boolean;
  menuNode: MenuNode;
  panels: PanelQuad[];
  selection: { field: string; method: string } | null;
  seeds: Vec3[];
  sliderDrag: SliderDrag | null;
  sliderDy: number;
  sliceFraction: number;
  isoItem: number | null;
  sliceItem: number | null;
  followItem: number | null;
  step: number;
  tf: TfPoint[];
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export async function startViewer(url: string): Promise<void> {
  const client = new EngineClient(new WebSocket(url) as never);
  const listing = await listFields(client);
  const bounds = domainBounds(listing);
  const size: [number, number, number] = [
    bounds.max[0] - bounds.min[0],
    bounds.max[1] - bounds.min[1],
    bounds.max[2] - bounds.min[2],
  ];

  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0x0b1020);
  const camera = new THREE.PerspectiveCamera(55, innerWidth / innerHeight, 0.01, 1000);
  camera.position.set(0, -2.5 * size[1], 1.5 * size[2]);
  camera.lookAt(0, 0, 0);
  const renderer = new THREE.WebGLRenderer({ canvas: el("view"), antialias: true });
  renderer.setSize(innerWidth, innerHeight);
  scene.add(new THREE.AmbientLight(0xffffff, 0.4));
  const sun = new THREE.DirectionalLight(0xffffff, 1.2);
  sun.position.set(2, -3, 4);
  scene.add(sun);
  scene.add(domainWireframe(bounds.min, bounds.max));

  const geometryGroup = new THREE.Group();
  scene.add(geometryGroup);
  const beam = new THREE.ArrowHelper(new THREE.Vector3(0, 1, 0), new THREE.Vector3(), 1, 0x66aaff);
  scene.add(beam);

  const root = buildMenu(listing);
  const state: UiState = {
    listing,
    wand: makeWand([0, -2 * size[1], 0], [0, 1, 0], 0.6 * size[1]),
    menuOpen: false,
    menuNode: root,
    panels: [],
    selection: null,
    seeds: [],
    sliderDrag: null,
    sliderDy: 0,
    sliceFraction: 0.5,
    isoItem: null,
    sliceItem: null,
    followItem: null,
    step: 0,
    tf: makeTf([
      [0, [0, 0, 0, 0]],
      [1, [1, 1, 1, 0.85]],
    ]),
  };

  // tracer particles fly along decoded polylines at param speed
  const particleClock: ParticleClock = { rate: 1, elapsed: 0 };
  let animatedLines: PolylineObject[] = [];
  const particleGeo = new THREE.BufferGeometry();
  const particles = new THREE.Points(
    particleGeo, new THREE.PointsMaterial({ color: 0xff9040, size: 0.05 }),
  );
  scene.add(particles);

  function showGeometry(payloads: Uint8Array[]): void {
    geometryGroup.clear();
    animatedLines = [];
    for (const payload of payloads) {
      for (const obj of decodeFrame(payload).objects) {
        geometryGroup.add(objectToThree(obj, size));
        if (obj.kind === "polyline" && obj.params.length > 2) {
          animatedLines.push(obj);
        }
      }
    }
  }

  function animateParticles(dt: number): void {
    if (!animatedLines.length) {
      particles.visible = false;
      return;
    }
    particles.visible = true;
    const pts = particlePositions(animatedLines, particleClock, dt);
    const flat = new Float32Array(pts.length * 3);
    pts.forEach((p, i) => flat.set(p, 3 * i));
    particleGeo.setAttribute("position", new THREE.BufferAttribute(flat, 3));
  }

  async function executeAll(): Promise<void> {
    const r = await client.call("Execute");
    showGeometry(r.geometry);
    refreshHud();
  }

  function refreshHud(): void {
    el("hud").innerText = hudLines(
      state.seeds, state.step, listing.steps, listing.dims,
    ).join("\n");
  }

  function wandFromPointer(ev: PointerEvent): WandState {
    const ndc = new THREE.Vector2(
      (ev.clientX / innerWidth) * 2 - 1,
      -(ev.clientY / innerHeight) * 2 + 1,
    );
    const ray = new THREE.Raycaster();
    ray.setFromCamera(ndc, camera);
    return makeWand(
      [ray.ray.origin.x, ray.ray.origin.y, ray.ray.origin.z],
      [ray.ray.direction.x, ray.ray.direction.y, ray.ray.direction.z],
      state.wand.beamLength,
      state.wand.activeButton,
    );
  }

  function probeParams(): Record<string, unknown> {
    const tip = probePoint(state.wand);
    return { center: [tip[0], tip[1], tip[2]] };
  }

  function coneParams(): Record<string, unknown> {
    const tip = probePoint(state.wand);
    return {
      apex: [tip[0], tip[1], tip[2]],
      direction: [...state.wand.rayDir],
      length: 0.4 * Math.hypot(...size),
      count: 300,
    };
  }

  async function onMenuPick(id: string): Promise<void> {
    const node = findNode(state.menuNode, id);
    if (!node) return;
    if (node.selection) {
      state.selection = node.selection;
      state.menuOpen = false;
      const { field, method } = node.selection;
      const addItem = async (params: Record<string, unknown>): Promise<number> => {
        const r = await client.call("AddItem", { method, field, params });
        return okOf(r).index as number;
      };
      if (method === "Isosurface") {
        state.isoItem = await addItem({ level: 0.0 });
      } else if (method === "Orthoslice") {
        state.sliceItem = await addItem({ axis: "z", index: 0 });
      } else if (method === "Volume") {
        await addItem(tfParams(state.tf));
        await executeAll();
      } else if (method === "LocalArrows") {
        state.followItem = await addItem(probeParams());
        await executeAll();
      } else if (method === "Snowflakes") {
        state.followItem = await addItem(coneParams());
        await executeAll();
      } else if (method === "LocalSlice") {
        state.followItem = await addItem({
          mode: "wand_perp",
          wand_dir: [...state.wand.rayDir],
          size: [0.35 * size[0], 0.35 * size[1]],
          res: [48, 48],
          ...probeParams(),
        });
        await executeAll();
      } else if (method === "LIC") {
        await addItem({ axis: "z", index: Math.floor(listing.dims[2] / 2), res: [128, 128] });
        await executeAll();
      } else if (method === "Hotaru") {
        await addItem({ count: 1500 });
        await executeAll();
      }
      el("mode").innerText = `${method} on ${field}`;
    } else {
      state.menuNode = node;
      state.panels = layoutPanels(node, [0, 0, 0.4 * size[2]]);
    }
  }

  // probe methods track the hand while the button is held (throttled)
  let lastFollow = 0;
  function followProbe(): void {
    const sel = state.selection;
    if (state.followItem === null || !sel || state.wand.activeButton !== "primary") return;
    const now = performance.now();
    if (now - lastFollow < 150) return;
    lastFollow = now;
    const params =
      sel.method === "Snowflakes" ? coneParams()
      : sel.method === "LocalSlice"
        ? { mode: "wand_perp", wand_dir: [...state.wand.rayDir],
            size: [0.35 * size[0], 0.35 * size[1]], res: [48, 48], ...probeParams() }
        : probeParams();
    const item = state.followItem;
    void client.call("UpdateItem", { index: item, params })
      .then(() => client.call("Execute", { index: item }))
      .then((r) => showGeometry(r.geometry))
      .catch(() => undefined);
  }

  addEventListener("pointermove", (ev) => {
    state.wand = wandFromPointer(ev);
    const tip = probePoint(state.wand);
    beam.position.set(...(state.wand.rayOrigin as [number, number, number]));
    beam.setDirection(new THREE.Vector3(...state.wand.rayDir));
    beam.setLength(state.wand.beamLength);
    el("probe").innerText = `probe (${tip[0].toFixed(2)}, ${tip[1].toFixed(2)}, ${tip[2].toFixed(2)})`;
    if (state.sliderDrag) {
      state.sliderDy += ev.movementY;
      el("mode").innerText = `level ${dragLevel(state.sliderDrag, -state.sliderDy).toFixed(3)}`;
    }
    followProbe();
  });

  addEventListener("wheel", (ev) => {
    state.wand = withBeamScroll(state.wand, ev.deltaY > 0 ? -1 : 1);
  });

  addEventListener("keydown", (ev) => {
    if (ev.key === "m") {
      state.menuOpen = !state.menuOpen;
      state.menuNode = root;
      state.panels = state.menuOpen ? layoutPanels(root, [0, 0, 0.4 * size[2]]) : [];
    }
    if (ev.key === "ArrowRight" || ev.key === "ArrowLeft") {
      const next = (state.step + (ev.key === "ArrowRight" ? 1 : -1) + listing.steps) % listing.steps;
      void client.call("SelectStep", { step: next }).then(() => {
        state.step = next;
        return executeAll();
      });
    }
  });

  addEventListener("pointerdown", (ev) => {
    state.wand = withButton(wandFromPointer(ev), "primary");
    if (state.menuOpen) {
      const hit = pickPanel(state.wand, state.panels);
      if (hit) void onMenuPick(hit);
      return;
    }
    const sel = state.selection;
    if (!sel) return;
    if (sel.method === "Tracer" || sel.method === "FieldLine") {
      const placed = placeSeed(client, state.wand, bounds, sel.field, sel.method);
      if (placed) {
        state.seeds.push(placed.seed);
        void placed.result.then(() => executeAll());
      } else {
        el("mode").innerText = "seed outside domain";
      }
    } else if (sel.method === "Isosurface" && state.isoItem !== null) {
      state.sliderDrag = {
        startLevel: 0.0,
        gainPerPixel: 0.005,
        levelMin: -10,
        levelMax: 10,
      };
      state.sliderDy = 0;
    }
  });

  addEventListener("pointerup", () => {
    state.wand = withButton(state.wand, null);
    if (state.sliderDrag && state.isoItem !== null) {
      const rel = releaseSlider(client, state.sliderDrag, -state.sliderDy, state.isoItem);
      void rel.execute.then((r) => showGeometry(r.geometry));
      state.sliderDrag = null;
    }
  });

  refreshHud();
  let lastTick = performance.now();
  const tick = (): void => {
    const now = performance.now();
    animateParticles((now - lastTick) / 1000);
    lastTick = now;
    renderer.render(scene, camera);
    requestAnimationFrame(tick);
  };
  tick();
}
