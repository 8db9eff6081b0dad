/** three.js scene construction for one display frame. */
import * as THREE from "three";

import { FACES, Vec3, VertexLabel } from "./bundle.js";
import { DisplayFrame } from "./state.js";

// faces paired by the symmetry classes of the angle families
const FACE_COLORS: Record<string, number> = {
  central: 0xcfd8dc,
  side12: 0x4f83cc,
  side34: 0x4f83cc,
  side23: 0x66bb6a,
  side41: 0x66bb6a,
  corner1: 0xffb74d,
  corner4: 0xffb74d,
  corner2: 0xba68c8,
  corner3: 0xba68c8,
};

const RED_TINT = 0xe53935;

export class NetScene {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer | null = null;
  private meshGroup = new THREE.Group();

  constructor(container: HTMLElement | null = null) {
    this.camera = new THREE.PerspectiveCamera(45, 4 / 3, 0.01, 100);
    this.camera.position.set(2.2, -2.4, 2.0);
    this.camera.up.set(0, 0, 1);
    this.camera.lookAt(0.5, 0.5, 0.2);
    this.scene.background = new THREE.Color(0x12161a);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.55));
    const sun = new THREE.DirectionalLight(0xffffff, 1.1);
    sun.position.set(3, -2, 5);
    this.scene.add(sun);
    this.scene.add(this.meshGroup);

    if (container) {
      this.renderer = new THREE.WebGLRenderer({ antialias: true });
      const w = container.clientWidth || 800;
      const h = container.clientHeight || 600;
      this.renderer.setSize(w, h);
      this.camera.aspect = w / h;
      this.camera.updateProjectionMatrix();
      container.appendChild(this.renderer.domElement);
    }
  }

  /** Rebuild the 9-face mesh for a frame; red-tinted when flagged. */
  showFrame(frame: DisplayFrame | null, selfIntersecting = false): void {
    this.meshGroup.clear();
    if (!frame) {
      this.draw();
      return;
    }
    for (const face of FACES) {
      const geometry = faceGeometry(face.labels.map((l: VertexLabel) => frame.vertices[l]));
      const color = selfIntersecting ? RED_TINT : FACE_COLORS[face.name] ?? 0x888888;
      const material = new THREE.MeshStandardMaterial({
        color,
        side: THREE.DoubleSide,
        flatShading: true,
        transparent: true,
        opacity: 0.95,
      });
      this.meshGroup.add(new THREE.Mesh(geometry, material));
      this.meshGroup.add(faceOutline(face.labels.map((l: VertexLabel) => frame.vertices[l])));
    }
    this.draw();
  }

  meshCount(): number {
    return this.meshGroup.children.filter((c) => c.type === "Mesh").length;
  }

  draw(): void {
    if (this.renderer) this.renderer.render(this.scene, this.camera);
  }
}

function faceGeometry(points: Vec3[]): THREE.BufferGeometry {
  const geometry = new THREE.BufferGeometry();
  const positions: number[] = [];
  // fan triangulation from the first vertex, matching the exporter
  for (let k = 1; k + 1 < points.length; k++) {
    positions.push(...points[0], ...points[k], ...points[k + 1]);
  }
  geometry.setAttribute("position", new THREE.Float32BufferAttribute(positions, 3));
  geometry.computeVertexNormals();
  return geometry;
}

function faceOutline(points: Vec3[]): THREE.LineLoop {
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute(
    "position",
    new THREE.Float32BufferAttribute(points.flat(), 3),
  );
  return new THREE.LineLoop(geometry, new THREE.LineBasicMaterial({ color: 0x222222 }));
}
